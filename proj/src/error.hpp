#pragma once

#include <stdexcept>
#include <string>

namespace sparselab {

// Error taxonomy shared by the C++ core, the C API and the CLI exit codes:
// tolerance failures are 1, configuration/argument problems are 2.
enum class errc : int {
    ok = 0,
    tolerance = 1,
    invalid_argument = 2,
    io = 3,
    internal = 4,
};

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail_invalid(const std::string& msg) {
    throw error(errc::invalid_argument, msg);
}

[[noreturn]] inline void fail_io(const std::string& msg) {
    throw error(errc::io, msg);
}

[[noreturn]] inline void fail_internal(const std::string& msg) {
    throw error(errc::internal, msg);
}

// Non-fatal diagnostics (degenerate shifts, snapped parameters, empty
// intersections) go through a replaceable sink so tests can capture them.
using warn_fn = void (*)(const std::string&);
void set_warning_handler(warn_fn fn); // nullptr restores the stderr default
void emit_warning(const std::string& msg);

} // namespace sparselab
