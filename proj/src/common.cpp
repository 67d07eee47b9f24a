#include "steer/common.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace steer {

const char* errc_name(errc c) {
    switch (c) {
        case errc::unknown_locale: return "UnknownLocale";
        case errc::missing_file: return "MissingFile";
        case errc::empty_corpus: return "EmptyCorpus";
        case errc::parse_error: return "ParseError";
        case errc::validation_error: return "ValidationError";
        case errc::layer_out_of_range: return "LayerOutOfRange";
        case errc::tokenization_failure: return "TokenizationFailure";
        case errc::candidate_not_in_vocabulary: return "CandidateNotInVocabulary";
        case errc::zero_vector: return "ZeroVector";
        case errc::empty_set: return "EmptySet";
        case errc::grid_exceeds_corpus: return "GridExceedsCorpus";
        case errc::scope_mismatch: return "ScopeMismatch";
        case errc::item_set_mismatch: return "ItemSetMismatch";
        case errc::incomplete_draws: return "IncompleteDraws";
        case errc::empty_results: return "EmptyResults";
        case errc::missing_vector: return "MissingVector";
        case errc::no_successful_cells: return "NoSuccessfulCells";
        case errc::missing_placeholder_value: return "MissingPlaceholderValue";
        case errc::backend_failure: return "BackendFailure";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::io_error: return "IoError";
        case errc::bad_config: return "BadConfig";
    }
    return "Error";
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<char32_t> decode_utf8(const std::string& text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    const auto* s = reinterpret_cast<const unsigned char*>(text.data());
    std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        unsigned char c = s[i];
        char32_t cp = 0;
        int extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            fail(errc::tokenization_failure, "malformed UTF-8 byte at offset " + std::to_string(i));
        }
        if (extra > 0 && i + extra >= n) {
            fail(errc::tokenization_failure, "truncated UTF-8 sequence at offset " + std::to_string(i));
        }
        for (int k = 1; k <= extra; ++k) {
            unsigned char cc = s[i + k];
            if ((cc & 0xC0) != 0x80) {
                fail(errc::tokenization_failure, "malformed UTF-8 continuation at offset " + std::to_string(i + k));
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        out.push_back(cp);
        i += 1 + extra;
    }
    return out;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::missing_file, path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io_error, "cannot open for writing: " + path);
    out << content;
    if (!out) fail(errc::io_error, "short write: " + path);
}

std::string sanitize_id(const std::string& id) {
    std::string out;
    out.reserve(id.size());
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '.' || c == '-' || c == '_';
        out.push_back(ok ? c : '_');
    }
    return out;
}

}  // namespace steer
