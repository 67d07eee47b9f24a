#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace steer {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Error categories surfaced by the toolkit. Tests match on the code, so the
// set is part of the public contract.
enum class errc {
    unknown_locale,
    missing_file,
    empty_corpus,
    parse_error,
    validation_error,
    layer_out_of_range,
    tokenization_failure,
    candidate_not_in_vocabulary,
    zero_vector,
    empty_set,
    grid_exceeds_corpus,
    scope_mismatch,
    item_set_mismatch,
    incomplete_draws,
    empty_results,
    missing_vector,
    no_successful_cells,
    missing_placeholder_value,
    backend_failure,
    dimension_mismatch,
    io_error,
    bad_config,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

// FNV-1a, used for content hashes and plan hashes. Stable across platforms.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// Current time as ISO-8601 UTC ("2026-01-31T12:00:00Z").
std::string iso8601_now();

// Decodes UTF-8 into code points. Throws errc::tokenization_failure on
// malformed input.
std::vector<char32_t> decode_utf8(const std::string& text);

// Shortest %g-style rendering, used wherever a real must name a file or key.
std::string format_real(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Filesystem-safe rendering of an identifier (model ids may contain '/').
std::string sanitize_id(const std::string& id);

}  // namespace steer
