#include "icaa/http.hpp"

#include "icaa/util.hpp"

#include <httplib.h>

#include <atomic>
#include <regex>

namespace icaa::http {

Url parse_url(const std::string& url) {
    static const std::regex re(R"(^(https?)://([^/:]+)(?::([0-9]+))?(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw Error("unsupported URL: " + url);
    Url u;
    u.scheme = m[1].str();
    u.host = m[2].str();
    u.port = m[3].matched ? std::stoi(m[3].str()) : (u.scheme == "https" ? 443 : 80);
    u.path = m[4].matched ? m[4].str() : "/";
    return u;
}

namespace {

std::atomic<std::size_t> g_requests{0};

httplib::Client make_client(const Url& u, std::chrono::seconds timeout) {
    httplib::Client client(u.scheme + "://" + u.host + ":" + std::to_string(u.port));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    return client;
}

Response convert(const httplib::Result& res) {
    Response out;
    if (!res) {
        out.error = httplib::to_string(res.error());
        return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
}

}  // namespace

Response post_json(const std::string& url, const std::string& body, const std::map<std::string, std::string>& headers,
                   std::chrono::seconds timeout) {
    const auto u = parse_url(url);
    ++g_requests;
    auto client = make_client(u, timeout);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    return convert(client.Post(u.path, h, body, "application/json"));
}

Response get(const std::string& url, std::chrono::seconds timeout) {
    const auto u = parse_url(url);
    ++g_requests;
    auto client = make_client(u, timeout);
    return convert(client.Get(u.path));
}

std::size_t request_count() { return g_requests.load(); }

}  // namespace icaa::http
