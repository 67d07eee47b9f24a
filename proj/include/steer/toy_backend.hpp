#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "steer/backend.hpp"
#include "steer/kernels.hpp"

namespace steer::toy {

// Desk-scale reference transformer: 2 post-norm blocks, hidden dim 16,
// single attention head, ffn dim 64, character-level vocabulary of 64.
// Weights are drawn from a seeded generator so the whole toolkit is testable
// without downloading a model.

inline constexpr int kLayers = 2;
inline constexpr int kHiddenDim = 16;
inline constexpr int kFfnDim = 64;
inline constexpr int kVocabSize = 64;
inline constexpr std::uint64_t kDefaultSeed = 2026;
inline constexpr int kWeightsFormatVersion = 1;

inline constexpr int kBosId = 0;
inline constexpr int kEotId = 1;
inline constexpr int kUnkId = 2;

struct BlockWeights {
    std::vector<double> wq, wk, wv, wo;   // [d x d]
    std::vector<double> ln1_g, ln1_b;     // [d]
    std::vector<double> w1, b1;           // [ffn x d], [ffn]
    std::vector<double> w2, b2;           // [d x ffn], [d]
    std::vector<double> ln2_g, ln2_b;     // [d]
};

struct ToyWeights {
    std::uint64_t seed = kDefaultSeed;
    std::vector<double> embedding;        // [vocab x d]
    std::vector<BlockWeights> blocks;     // kLayers entries
    std::vector<double> unembed, unembed_b;  // [vocab x d], [vocab]

    static ToyWeights generate(std::uint64_t seed);

    // Versioned on-disk form: raw little-endian float64 tensors in a fixed
    // order, with a JSON sidecar naming seed, dims and checksum.
    void save(const std::string& bin_path, const std::string& sidecar_path) const;
    static ToyWeights load(const std::string& bin_path, const std::string& sidecar_path);

    std::vector<double> flatten() const;
    std::uint64_t checksum() const;
};

class ToySession final : public BackendSession {
public:
    explicit ToySession(std::shared_ptr<const ToyWeights> weights,
                        kernels::ExecMode mode = kernels::ExecMode::parallel,
                        std::string model_id = "toy-v1");

    const std::string& model_id() const override { return model_id_; }
    int layer_count() const override { return kLayers; }
    int hidden_dim() const override { return kHiddenDim; }
    int vocab_size() const override { return kVocabSize; }
    std::string token_text(int token_id) const override;
    std::vector<int> tokenize(const std::string& text, bool add_special) const override;

    ActivationMatrix capture_activations(const std::string& text, int layer,
                                         const std::optional<Intervention>& iv = {}) const override;
    std::map<std::string, double> next_token_logprobs(
        const std::string& prompt, const std::optional<Intervention>& iv = {}) const override;
    std::string generate_greedy(const std::string& prompt, int max_tokens,
                                const std::optional<Intervention>& iv = {}) const override;

    std::unique_ptr<BackendSession> clone() const override;

private:
    // Runs the stack over `tokens`; returns all residual streams, one
    // [t x d] matrix per layer. prompt_len gates apply_to_prompt.
    std::vector<std::vector<double>> forward_streams(const std::vector<int>& tokens,
                                                     const std::optional<Intervention>& iv,
                                                     int prompt_len) const;
    std::vector<double> next_logits(const std::vector<int>& tokens,
                                    const std::optional<Intervention>& iv, int prompt_len) const;
    void check_intervention(const std::optional<Intervention>& iv) const;

    std::shared_ptr<const ToyWeights> weights_;
    kernels::ExecMode mode_;
    std::string model_id_;
};

// Deterministic normal variates: mt19937_64 bits -> uniform doubles in (0,1]
// -> Box-Muller. mt19937_64 output is pinned by the standard, so a seed
// names the stream exactly; std::normal_distribution is avoided because its
// algorithm is implementation-defined.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next();

private:
    double next_uniform();

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace steer::toy
