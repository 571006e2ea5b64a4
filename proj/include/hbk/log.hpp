#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string>

namespace hbk {

// Warnings go through a replaceable sink so that tests and the CLI can
// capture them. The default prints to stderr.
using WarningSink = std::function<void(const std::string&)>;

namespace detail {
inline std::mutex& warn_mutex() {
    static std::mutex m;
    return m;
}
inline WarningSink& warn_sink() {
    static WarningSink sink = [](const std::string& msg) { std::cerr << "hbk warning: " << msg << '\n'; };
    return sink;
}
}  // namespace detail

inline WarningSink set_warning_sink(WarningSink sink) {
    std::lock_guard<std::mutex> lock(detail::warn_mutex());
    auto old = std::move(detail::warn_sink());
    detail::warn_sink() = std::move(sink);
    return old;
}

inline void warn(const std::string& msg) {
    std::lock_guard<std::mutex> lock(detail::warn_mutex());
    if (detail::warn_sink()) detail::warn_sink()(msg);
}

}  // namespace hbk
