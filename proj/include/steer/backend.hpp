#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace steer {

// One-layer additive intervention on the residual stream. During a forward
// pass the stream emitted by block `layer` becomes h + strength * u, where
// u is `direction` L2-normalized when normalize_direction is set and raw
// otherwise. With apply_to_prompt the addition happens at every token
// position; without it, only at positions appended after the prompt.
// strength == 0 is an exact no-op.
struct Intervention {
    int layer = 0;
    std::vector<double> direction;
    double strength = 1.0;
    bool apply_to_prompt = true;
    bool normalize_direction = true;

    // Stable one-line rendering used in result records and file names.
    std::string descriptor(const std::string& kind_label) const;
};

// Residual-stream states for one input: rows = token positions (including
// the tokenizer's begin-of-sequence marker), cols = hidden_dim.
struct ActivationMatrix {
    int layer = 0;
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // row-major

    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Abstract model interface. Implementations must be deterministic: repeated
// identical calls with identical interventions produce identical outputs.
// A session is not required to be safe for concurrent calls; callers give
// each worker its own clone().
class BackendSession {
public:
    virtual ~BackendSession() = default;

    virtual const std::string& model_id() const = 0;
    virtual int layer_count() const = 0;
    virtual int hidden_dim() const = 0;
    virtual int vocab_size() const = 0;
    virtual std::string token_text(int token_id) const = 0;

    // add_special prepends the begin-of-sequence marker (what forward passes
    // consume). Candidate-token resolution passes false.
    virtual std::vector<int> tokenize(const std::string& text, bool add_special) const = 0;

    // Post-normalization residual stream at `layer` (0-based from the first
    // block) for the raw text, no prompt template added.
    virtual ActivationMatrix capture_activations(const std::string& text, int layer,
                                                 const std::optional<Intervention>& iv = {}) const = 0;

    // Log-probabilities of the next token for the full vocabulary, keyed by
    // token text. exp() of the values sums to 1.
    virtual std::map<std::string, double> next_token_logprobs(
        const std::string& prompt, const std::optional<Intervention>& iv = {}) const = 0;

    // Greedy continuation, stopping at max_tokens or at the end-of-text
    // token (which is not included in the returned text).
    virtual std::string generate_greedy(const std::string& prompt, int max_tokens,
                                        const std::optional<Intervention>& iv = {}) const = 0;

    virtual std::unique_ptr<BackendSession> clone() const = 0;
};

}  // namespace steer
