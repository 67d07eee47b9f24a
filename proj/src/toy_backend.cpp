#include "steer/toy_backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "steer/common.hpp"
#include "steer/vecmath.hpp"

namespace steer::toy {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Gaussian stream

double GaussianStream::next_uniform() {
    // 53-bit mantissa, shifted into (0, 1] so log() below is always finite.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 1.0) * (1.0 / 9007199254740992.0);
}

double GaussianStream::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

// ---------------------------------------------------------------------------
// Vocabulary: 64 character-level tokens

namespace {

struct Vocab {
    std::vector<std::string> render;   // id -> text
    int char_to_id[128];

    Vocab() {
        std::fill(std::begin(char_to_id), std::end(char_to_id), -1);
        render.resize(kVocabSize);
        render[kBosId] = "<bos>";
        render[kEotId] = "<|end_of_text|>";
        render[kUnkId] = "\xEF\xBF\xBD";  // U+FFFD
        int id = 3;
        auto add = [&](char c) {
            render[id] = std::string(1, c);
            char_to_id[static_cast<unsigned char>(c)] = id;
            ++id;
        };
        add(' ');
        add('\n');
        add('.');
        add(',');
        add('?');
        for (char c = 'A'; c <= 'Z'; ++c) add(c);
        for (char c = 'a'; c <= 'z'; ++c) add(c);
        for (char c = '0'; c <= '3'; ++c) add(c);
        // id must land exactly on kVocabSize; the table is part of the
        // backend's versioned contract.
    }
};

const Vocab& vocab() {
    static const Vocab v;
    return v;
}

void fill_gaussian(std::vector<double>& v, std::size_t n, GaussianStream& g, double scale) {
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = g.next() * scale;
}

constexpr double kLnEps = 1e-5;
constexpr double kAttnScale = 0.25;  // 1/sqrt(16)

// Sinusoidal position encoding; no learned table, so any length works.
void add_position_encoding(std::vector<double>& x, int t, int d) {
    for (int pos = 0; pos < t; ++pos) {
        for (int i = 0; i < d / 2; ++i) {
            const double freq = std::pow(10000.0, -2.0 * i / d);
            x[static_cast<std::size_t>(pos) * d + 2 * i] += std::sin(pos * freq);
            x[static_cast<std::size_t>(pos) * d + 2 * i + 1] += std::cos(pos * freq);
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Weights

ToyWeights ToyWeights::generate(std::uint64_t seed) {
    ToyWeights w;
    w.seed = seed;
    GaussianStream g(seed);
    const int d = kHiddenDim, f = kFfnDim, v = kVocabSize;
    // Draw order is fixed and documented in the sidecar; changing it is a
    // format version bump.
    fill_gaussian(w.embedding, static_cast<std::size_t>(v) * d, g, 0.4);
    w.blocks.resize(kLayers);
    for (auto& b : w.blocks) {
        fill_gaussian(b.wq, static_cast<std::size_t>(d) * d, g, 0.3);
        fill_gaussian(b.wk, static_cast<std::size_t>(d) * d, g, 0.3);
        fill_gaussian(b.wv, static_cast<std::size_t>(d) * d, g, 0.3);
        fill_gaussian(b.wo, static_cast<std::size_t>(d) * d, g, 0.3);
        fill_gaussian(b.ln1_g, d, g, 0.1);
        for (auto& x : b.ln1_g) x += 1.0;
        fill_gaussian(b.ln1_b, d, g, 0.1);
        fill_gaussian(b.w1, static_cast<std::size_t>(f) * d, g, 0.3);
        fill_gaussian(b.b1, f, g, 0.1);
        fill_gaussian(b.w2, static_cast<std::size_t>(d) * f, g, 0.3);
        fill_gaussian(b.b2, d, g, 0.1);
        fill_gaussian(b.ln2_g, d, g, 0.1);
        for (auto& x : b.ln2_g) x += 1.0;
        fill_gaussian(b.ln2_b, d, g, 0.1);
    }
    fill_gaussian(w.unembed, static_cast<std::size_t>(v) * d, g, 0.4);
    fill_gaussian(w.unembed_b, v, g, 0.1);
    return w;
}

std::vector<double> ToyWeights::flatten() const {
    std::vector<double> out;
    auto app = [&](const std::vector<double>& v) { out.insert(out.end(), v.begin(), v.end()); };
    app(embedding);
    for (const auto& b : blocks) {
        app(b.wq); app(b.wk); app(b.wv); app(b.wo);
        app(b.ln1_g); app(b.ln1_b);
        app(b.w1); app(b.b1); app(b.w2); app(b.b2);
        app(b.ln2_g); app(b.ln2_b);
    }
    app(unembed);
    app(unembed_b);
    return out;
}

std::uint64_t ToyWeights::checksum() const {
    const auto flat = flatten();
    return fnv1a64(flat.data(), flat.size() * sizeof(double));
}

void ToyWeights::save(const std::string& bin_path, const std::string& sidecar_path) const {
    const auto flat = flatten();
    std::filesystem::path p(bin_path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(bin_path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io_error, "cannot write " + bin_path);
    out.write(reinterpret_cast<const char*>(flat.data()),
              static_cast<std::streamsize>(flat.size() * sizeof(double)));
    if (!out) fail(errc::io_error, "short write " + bin_path);

    json side;
    side["format_version"] = kWeightsFormatVersion;
    side["seed"] = seed;
    side["layer_count"] = kLayers;
    side["hidden_dim"] = kHiddenDim;
    side["ffn_dim"] = kFfnDim;
    side["vocab_size"] = kVocabSize;
    side["dtype"] = "float64-le";
    side["value_count"] = flat.size();
    side["checksum_fnv1a64"] = hex64(checksum());
    side["tensor_order"] = json::array({
        "embedding[vocab,d]",
        "per block: wq[d,d] wk[d,d] wv[d,d] wo[d,d] ln1_g[d] ln1_b[d] w1[ffn,d] b1[ffn] w2[d,ffn] b2[d] ln2_g[d] ln2_b[d]",
        "unembed[vocab,d]",
        "unembed_b[vocab]",
    });
    write_text_file(sidecar_path, side.dump(2) + "\n");
}

ToyWeights ToyWeights::load(const std::string& bin_path, const std::string& sidecar_path) {
    json side;
    try {
        side = json::parse(read_text_file(sidecar_path));
    } catch (const json::exception& e) {
        fail(errc::parse_error, sidecar_path + ": " + e.what());
    }
    if (side.value("format_version", -1) != kWeightsFormatVersion ||
        side.value("layer_count", -1) != kLayers || side.value("hidden_dim", -1) != kHiddenDim ||
        side.value("ffn_dim", -1) != kFfnDim || side.value("vocab_size", -1) != kVocabSize) {
        fail(errc::validation_error, sidecar_path + ": sidecar dims do not match this build");
    }
    const std::uint64_t seed = side.at("seed").get<std::uint64_t>();
    const std::size_t expect = side.at("value_count").get<std::size_t>();

    std::ifstream in(bin_path, std::ios::binary);
    if (!in) fail(errc::missing_file, bin_path);
    std::vector<double> flat(expect);
    in.read(reinterpret_cast<char*>(flat.data()), static_cast<std::streamsize>(expect * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != expect * sizeof(double))
        fail(errc::validation_error, bin_path + ": truncated weight file");
    in.peek();
    if (!in.eof()) fail(errc::validation_error, bin_path + ": trailing bytes in weight file");

    ToyWeights w;
    w.seed = seed;
    const int d = kHiddenDim, f = kFfnDim, v = kVocabSize;
    std::size_t off = 0;
    auto take = [&](std::vector<double>& dst, std::size_t n) {
        if (off + n > flat.size()) fail(errc::validation_error, bin_path + ": weight file too small");
        dst.assign(flat.begin() + static_cast<std::ptrdiff_t>(off),
                   flat.begin() + static_cast<std::ptrdiff_t>(off + n));
        off += n;
    };
    take(w.embedding, static_cast<std::size_t>(v) * d);
    w.blocks.resize(kLayers);
    for (auto& b : w.blocks) {
        take(b.wq, static_cast<std::size_t>(d) * d);
        take(b.wk, static_cast<std::size_t>(d) * d);
        take(b.wv, static_cast<std::size_t>(d) * d);
        take(b.wo, static_cast<std::size_t>(d) * d);
        take(b.ln1_g, d);
        take(b.ln1_b, d);
        take(b.w1, static_cast<std::size_t>(f) * d);
        take(b.b1, f);
        take(b.w2, static_cast<std::size_t>(d) * f);
        take(b.b2, d);
        take(b.ln2_g, d);
        take(b.ln2_b, d);
    }
    take(w.unembed, static_cast<std::size_t>(v) * d);
    take(w.unembed_b, v);
    if (off != flat.size()) fail(errc::validation_error, bin_path + ": size mismatch");

    const std::string want = side.at("checksum_fnv1a64").get<std::string>();
    if (hex64(w.checksum()) != want)
        fail(errc::validation_error, bin_path + ": checksum mismatch vs sidecar");
    return w;
}

// ---------------------------------------------------------------------------
// Session

ToySession::ToySession(std::shared_ptr<const ToyWeights> weights, kernels::ExecMode mode,
                       std::string model_id)
    : weights_(std::move(weights)), mode_(mode), model_id_(std::move(model_id)) {
    if (!weights_) fail(errc::backend_failure, "toy session needs weights");
}

std::string ToySession::token_text(int token_id) const {
    if (token_id < 0 || token_id >= kVocabSize)
        fail(errc::candidate_not_in_vocabulary, "token id " + std::to_string(token_id));
    return vocab().render[static_cast<std::size_t>(token_id)];
}

std::vector<int> ToySession::tokenize(const std::string& text, bool add_special) const {
    const auto cps = decode_utf8(text);
    std::vector<int> out;
    out.reserve(cps.size() + 1);
    if (add_special) out.push_back(kBosId);
    for (char32_t cp : cps) {
        int id = kUnkId;
        if (cp < 128) {
            const int mapped = vocab().char_to_id[cp];
            if (mapped >= 0) id = mapped;
        }
        out.push_back(id);
    }
    return out;
}

void ToySession::check_intervention(const std::optional<Intervention>& iv) const {
    if (!iv) return;
    if (iv->layer < 0 || iv->layer >= kLayers)
        fail(errc::layer_out_of_range,
             "intervention layer " + std::to_string(iv->layer) + " outside [0, " +
                 std::to_string(kLayers) + ")");
    if (static_cast<int>(iv->direction.size()) != kHiddenDim)
        fail(errc::dimension_mismatch, "intervention direction has dim " +
                                           std::to_string(iv->direction.size()) + ", expected " +
                                           std::to_string(kHiddenDim));
}

std::vector<std::vector<double>> ToySession::forward_streams(const std::vector<int>& tokens,
                                                             const std::optional<Intervention>& iv,
                                                             int prompt_len) const {
    namespace k = steer::kernels;
    const int t = static_cast<int>(tokens.size());
    const int d = kHiddenDim;
    const auto& w = *weights_;

    // strength 0 must reproduce the unsteered pass bit-exactly, so it skips
    // the addition entirely.
    std::vector<double> steer_vec;
    if (iv && iv->strength != 0.0) {
        steer_vec = iv->normalize_direction ? unit_vector(iv->direction) : iv->direction;
        for (auto& x : steer_vec) x *= iv->strength;
    }

    std::vector<double> x(static_cast<std::size_t>(t) * d);
    for (int p = 0; p < t; ++p)
        std::memcpy(&x[static_cast<std::size_t>(p) * d], &w.embedding[static_cast<std::size_t>(tokens[p]) * d],
                    sizeof(double) * d);
    add_position_encoding(x, t, d);

    std::vector<std::vector<double>> streams;
    streams.reserve(kLayers);

    std::vector<double> q(x.size()), kk(x.size()), v(x.size()), attn(x.size()), proj(x.size());
    std::vector<double> ffn_mid(static_cast<std::size_t>(t) * kFfnDim), ffn_out(x.size());

    for (int layer = 0; layer < kLayers; ++layer) {
        const auto& b = w.blocks[static_cast<std::size_t>(layer)];
        k::matmul_nt(mode_, x.data(), b.wq.data(), nullptr, q.data(), t, d, d);
        k::matmul_nt(mode_, x.data(), b.wk.data(), nullptr, kk.data(), t, d, d);
        k::matmul_nt(mode_, x.data(), b.wv.data(), nullptr, v.data(), t, d, d);
        k::causal_attention(mode_, q.data(), kk.data(), v.data(), attn.data(), t, d, kAttnScale);
        k::matmul_nt(mode_, attn.data(), b.wo.data(), nullptr, proj.data(), t, d, d);
        k::add_inplace(mode_, x.data(), proj.data(), x.size());
        k::layer_norm_rows(mode_, x.data(), t, d, b.ln1_g.data(), b.ln1_b.data(), kLnEps);

        k::matmul_nt(mode_, x.data(), b.w1.data(), b.b1.data(), ffn_mid.data(), t, d, kFfnDim);
        k::tanh_inplace(mode_, ffn_mid.data(), ffn_mid.size());
        k::matmul_nt(mode_, ffn_mid.data(), b.w2.data(), b.b2.data(), ffn_out.data(), t, kFfnDim, d);
        k::add_inplace(mode_, x.data(), ffn_out.data(), x.size());
        k::layer_norm_rows(mode_, x.data(), t, d, b.ln2_g.data(), b.ln2_b.data(), kLnEps);

        if (iv && iv->layer == layer && !steer_vec.empty()) {
            const int first = iv->apply_to_prompt ? 0 : prompt_len;
            for (int p = first; p < t; ++p)
                for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(p) * d + i] += steer_vec[i];
        }

        streams.push_back(x);
    }
    return streams;
}

std::vector<double> ToySession::next_logits(const std::vector<int>& tokens,
                                            const std::optional<Intervention>& iv,
                                            int prompt_len) const {
    namespace k = steer::kernels;
    const auto streams = forward_streams(tokens, iv, prompt_len);
    const auto& last = streams.back();
    const double* h = &last[last.size() - kHiddenDim];
    std::vector<double> logits(kVocabSize);
    k::matmul_nt(mode_, h, weights_->unembed.data(), weights_->unembed_b.data(), logits.data(), 1,
                 kHiddenDim, kVocabSize);
    return logits;
}

ActivationMatrix ToySession::capture_activations(const std::string& text, int layer,
                                                 const std::optional<Intervention>& iv) const {
    if (layer < 0 || layer >= kLayers)
        fail(errc::layer_out_of_range, "capture layer " + std::to_string(layer));
    check_intervention(iv);
    if (text.empty()) fail(errc::tokenization_failure, "empty input text");
    const auto tokens = tokenize(text, true);

    // Raw text capture: every position counts as prompt.
    const auto streams = forward_streams(tokens, iv, static_cast<int>(tokens.size()));
    ActivationMatrix m;
    m.layer = layer;
    m.rows = static_cast<int>(tokens.size());
    m.cols = kHiddenDim;
    m.data = streams[static_cast<std::size_t>(layer)];
    return m;
}

std::map<std::string, double> ToySession::next_token_logprobs(
    const std::string& prompt, const std::optional<Intervention>& iv) const {
    check_intervention(iv);
    if (prompt.empty()) fail(errc::tokenization_failure, "empty prompt");
    const auto tokens = tokenize(prompt, true);
    auto logits = next_logits(tokens, iv, static_cast<int>(tokens.size()));

    double mx = logits[0];
    for (double l : logits) mx = l > mx ? l : mx;
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - mx);
    const double lse = mx + std::log(sum);

    std::map<std::string, double> out;
    for (int id = 0; id < kVocabSize; ++id) out[vocab().render[static_cast<std::size_t>(id)]] = logits[static_cast<std::size_t>(id)] - lse;
    return out;
}

std::string ToySession::generate_greedy(const std::string& prompt, int max_tokens,
                                        const std::optional<Intervention>& iv) const {
    check_intervention(iv);
    if (max_tokens < 1) fail(errc::bad_config, "max_tokens must be >= 1");
    if (prompt.empty()) fail(errc::tokenization_failure, "empty prompt");

    auto tokens = tokenize(prompt, true);
    const int prompt_len = static_cast<int>(tokens.size());
    std::string out;
    for (int step = 0; step < max_tokens; ++step) {
        const auto logits = next_logits(tokens, iv, prompt_len);
        int best = 0;
        for (int id = 1; id < kVocabSize; ++id)
            if (logits[static_cast<std::size_t>(id)] > logits[static_cast<std::size_t>(best)]) best = id;  // ties keep the lowest id
        if (best == kEotId) break;
        out += vocab().render[static_cast<std::size_t>(best)];
        tokens.push_back(best);
    }
    return out;
}

std::unique_ptr<BackendSession> ToySession::clone() const {
    return std::make_unique<ToySession>(weights_, mode_, model_id_);
}

}  // namespace steer::toy
