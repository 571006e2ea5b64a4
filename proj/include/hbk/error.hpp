#pragma once

#include <stdexcept>
#include <string>

namespace hbk {

/// Error carrying a short machine-readable code ("not-hermitian",
/// "bad-regulator", ...) alongside the human-readable message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
inline constexpr const char* not_hermitian = "not-hermitian";
inline constexpr const char* not_psd = "not-psd";
inline constexpr const char* bad_regulator = "bad-regulator";
inline constexpr const char* grid_mismatch = "grid-mismatch";
inline constexpr const char* bad_radius = "bad-radius";
inline constexpr const char* bad_grid = "bad-grid";
inline constexpr const char* bad_schedule = "bad-schedule";
inline constexpr const char* dt_too_large = "dt-too-large";
inline constexpr const char* empty_input = "empty-input";
inline constexpr const char* window_too_long = "window-too-long";
inline constexpr const char* resolution_too_coarse = "resolution-too-coarse";
inline constexpr const char* spectral_underresolved = "spectral-quadrature-underresolved";
inline constexpr const char* io = "io";
inline constexpr const char* config = "config";
}  // namespace errc

}  // namespace hbk
