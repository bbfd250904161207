#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latent_reach/core.hpp"

namespace latent_reach {

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> precision;  // undefined when tp + fp == 0
  std::optional<double> recall;     // undefined when tp + fn == 0
  std::optional<double> f1;         // undefined when p + r == 0 or either is undefined
  double accuracy = 0.0;
};

Confusion confusion_and_f1(const std::vector<bool>& predicted_unsafe, const std::vector<bool>& truly_unsafe);

/// Fraction of initially unsafe scenarios that are safe after steering.
std::optional<double> safety_rate(const std::vector<bool>& before_unsafe, const std::vector<bool>& after_unsafe);

/// Product over n = 2..4 of unique n-grams / total n-grams. An n with no
/// n-grams contributes a factor of 1.
double diversity(std::span<const std::string> tokens);

/// Whitespace tokenization for plain-text responses.
std::vector<std::string> whitespace_tokens(const std::string& text);

/// Cosine similarity; undefined when either vector is zero.
std::optional<double> coherence(const LatentPoint& prompt_embedding, const LatentPoint& response_embedding);

double mean_inference_time(std::span<const double> seconds);

}  // namespace latent_reach
