#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

namespace webforge {

struct UrlParts {
    std::string scheme;
    std::string host;
    std::string path;     // starts with '/' when non-empty
    std::string query;    // without '?'
    std::string fragment; // without '#'
};

inline UrlParts split_url(std::string_view url) {
    UrlParts p;
    auto rest = url;
    if (auto pos = rest.find("://"); pos != std::string_view::npos) {
        p.scheme = std::string(rest.substr(0, pos));
        rest = rest.substr(pos + 3);
    }
    if (auto pos = rest.find('#'); pos != std::string_view::npos) {
        p.fragment = std::string(rest.substr(pos + 1));
        rest = rest.substr(0, pos);
    }
    if (auto pos = rest.find('?'); pos != std::string_view::npos) {
        p.query = std::string(rest.substr(pos + 1));
        rest = rest.substr(0, pos);
    }
    if (auto pos = rest.find('/'); pos != std::string_view::npos) {
        p.host = std::string(rest.substr(0, pos));
        p.path = std::string(rest.substr(pos));
    } else {
        p.host = std::string(rest);
    }
    return p;
}

inline std::string host_of(std::string_view url) {
    return split_url(url).host;
}

inline std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace webforge
