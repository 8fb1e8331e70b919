#include "roadchat/http_client.hpp"

#include <httplib.h>

#include "url.hpp"

namespace roadchat::http {

namespace {

httplib::Client make_client(const detail::UrlParts& url, int timeout_s) {
  httplib::Client client(url.origin);
  client.set_connection_timeout(timeout_s < 5 ? timeout_s : 5);
  client.set_read_timeout(timeout_s);
  client.set_write_timeout(timeout_s);
  return client;
}

httplib::Headers to_headers(const Headers& headers) {
  httplib::Headers out;
  for (const auto& [k, v] : headers) out.emplace(k, v);
  return out;
}

std::optional<Response> convert(const httplib::Result& res) {
  if (!res) return std::nullopt;
  return Response{res->status, res->body};
}

}  // namespace

std::optional<Response> get(const std::string& url, const Params& query, const Headers& headers,
                            int timeout_s) {
  const auto parts = detail::split_url(url);
  auto client = make_client(parts, timeout_s);
  auto path = parts.path;
  char sep = path.find('?') == std::string::npos ? '?' : '&';
  for (const auto& [k, v] : query) {
    path += sep;
    path += k + "=" + httplib::detail::encode_query_param(v);
    sep = '&';
  }
  return convert(client.Get(path, to_headers(headers)));
}

std::optional<Response> post_json(const std::string& url, const std::string& body,
                                  const Headers& headers, int timeout_s) {
  const auto parts = detail::split_url(url);
  auto client = make_client(parts, timeout_s);
  return convert(client.Post(parts.path, to_headers(headers), body, "application/json"));
}

std::optional<Response> post_form(const std::string& url, const Params& form, int timeout_s) {
  const auto parts = detail::split_url(url);
  auto client = make_client(parts, timeout_s);
  httplib::Params params;
  for (const auto& [k, v] : form) params.emplace(k, v);
  return convert(client.Post(parts.path, params));
}

}  // namespace roadchat::http
