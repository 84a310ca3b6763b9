#pragma once

#include <stdexcept>
#include <string>

namespace patchwork {

enum class errc {
  index_out_of_range,
  duplicate_value,
  ambiguous_cell,
  singular_point,
  step_too_large,
  no_escape,
  under_resolved,
  under_coverage,
  near_singularity,
  underdetermined,
  degenerate_input,
  invalid_path,
  config_error,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::index_out_of_range: return "index_out_of_range";
    case errc::duplicate_value: return "duplicate_value";
    case errc::ambiguous_cell: return "ambiguous_cell";
    case errc::singular_point: return "singular_point";
    case errc::step_too_large: return "step_too_large";
    case errc::no_escape: return "no_escape";
    case errc::under_resolved: return "under_resolved";
    case errc::under_coverage: return "under_coverage";
    case errc::near_singularity: return "near_singularity";
    case errc::underdetermined: return "underdetermined";
    case errc::degenerate_input: return "degenerate_input";
    case errc::invalid_path: return "invalid_path";
    case errc::config_error: return "config_error";
    case errc::io_error: return "io_error";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

}  // namespace patchwork
