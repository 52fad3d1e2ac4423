#pragma once

#include <stdexcept>
#include <string>

namespace tcva {

// Error categories surfaced through the C API as status codes.
enum class Errc {
    empty_input,
    out_of_range,
    contract,
    parse,
    transport,
    schema,
    config,
    undefined_correlation,
    degenerate_bootstrap,
    extraction_failure,
    cache_miss,
    io,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace tcva
