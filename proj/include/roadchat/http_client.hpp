#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace roadchat::http {

struct Response {
  int status = 0;
  std::string body;
};

using Headers = std::vector<std::pair<std::string, std::string>>;
using Params = std::vector<std::pair<std::string, std::string>>;

/// Blocking requests. A nullopt result means the endpoint could not be reached at all.
std::optional<Response> get(const std::string& url, const Params& query = {},
                            const Headers& headers = {}, int timeout_s = 10);
std::optional<Response> post_json(const std::string& url, const std::string& body,
                                  const Headers& headers = {}, int timeout_s = 60);
std::optional<Response> post_form(const std::string& url, const Params& form,
                                  int timeout_s = 120);

}  // namespace roadchat::http
