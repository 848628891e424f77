#pragma once
// Minimal blocking HTTP(S) client used by the chat gateway, the remote embedder and
// live web search.

#include <chrono>
#include <cstddef>
#include <map>
#include <string>

namespace icaa::http {

struct Url {
    std::string scheme;  // "http" or "https"
    std::string host;
    int port = 80;
    std::string path;  // includes query, starts with '/'
};

// Throws icaa::Error for anything that is not http(s)://host[:port][/path].
Url parse_url(const std::string& url);

struct Response {
    int status = 0;  // 0 when the connection failed
    std::string body;
    std::string error;
};

Response post_json(const std::string& url, const std::string& body, const std::map<std::string, std::string>& headers,
                   std::chrono::seconds timeout = std::chrono::seconds(120));
Response get(const std::string& url, std::chrono::seconds timeout = std::chrono::seconds(30));

// Requests attempted by this process through post_json and get.
std::size_t request_count();

}  // namespace icaa::http
