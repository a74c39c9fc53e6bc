#pragma once

#include <atomic>
#include <map>
#include <string>

#include "srvscan/core.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"

namespace srvscan::net {

// Single chokepoint for all outbound HTTP. Tests flip deny() to prove that
// heuristic/replay scans perform zero network operations.
inline std::atomic<bool>& deny_flag() {
  static std::atomic<bool> f{false};
  return f;
}

inline std::atomic<long>& op_counter() {
  static std::atomic<long> c{0};
  return c;
}

struct HttpResponse {
  int status = 0;
  std::string body;
};

inline HttpResponse http_post_json(const std::string& base_url,
                                   const std::string& path,
                                   const std::string& body,
                                   const std::map<std::string, std::string>& headers,
                                   int timeout_seconds = 60) {
  if (deny_flag().load())
    throw HttpError("network operation denied by harness: POST " + base_url + path);
  op_counter().fetch_add(1);
  httplib::Client client(base_url);
  client.set_connection_timeout(timeout_seconds);
  client.set_read_timeout(timeout_seconds);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(path, h, body, "application/json");
  if (!res) throw HttpError("POST " + base_url + path + " failed: transport error");
  return {res->status, res->body};
}

inline HttpResponse http_get(const std::string& base_url, const std::string& path,
                             const std::map<std::string, std::string>& headers = {},
                             int timeout_seconds = 60) {
  if (deny_flag().load())
    throw HttpError("network operation denied by harness: GET " + base_url + path);
  op_counter().fetch_add(1);
  httplib::Client client(base_url);
  client.set_connection_timeout(timeout_seconds);
  client.set_read_timeout(timeout_seconds);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Get(path, h);
  if (!res) throw HttpError("GET " + base_url + path + " failed: transport error");
  return {res->status, res->body};
}

}  // namespace srvscan::net
