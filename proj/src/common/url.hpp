#pragma once

#include <string>
#include <string_view>

namespace roadchat::detail {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/', may carry a query string
};

inline UrlParts split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  std::size_t host_start = scheme_end == std::string_view::npos ? 0 : scheme_end + 3;
  auto path_start = url.find('/', host_start);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

}  // namespace roadchat::detail
