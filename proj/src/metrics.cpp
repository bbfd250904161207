#include "latent_reach/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace latent_reach {

Confusion confusion_and_f1(const std::vector<bool>& predicted_unsafe, const std::vector<bool>& truly_unsafe) {
  if (predicted_unsafe.size() != truly_unsafe.size()) throw Error("prediction and truth lists differ in length");
  if (predicted_unsafe.empty()) throw Error("confusion matrix needs at least one example");
  Confusion c;
  for (std::size_t i = 0; i < predicted_unsafe.size(); ++i) {
    const bool p = predicted_unsafe[i], t = truly_unsafe[i];
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  if (c.tp + c.fp > 0) c.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) c.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (c.precision && c.recall && *c.precision + *c.recall > 0.0) {
    c.f1 = 2.0 * *c.precision * *c.recall / (*c.precision + *c.recall);
  }
  c.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(predicted_unsafe.size());
  return c;
}

std::optional<double> safety_rate(const std::vector<bool>& before_unsafe, const std::vector<bool>& after_unsafe) {
  if (before_unsafe.size() != after_unsafe.size()) throw Error("before and after lists differ in length");
  std::size_t unsafe = 0, fixed = 0;
  for (std::size_t i = 0; i < before_unsafe.size(); ++i) {
    if (!before_unsafe[i]) continue;
    ++unsafe;
    if (!after_unsafe[i]) ++fixed;
  }
  if (unsafe == 0) return std::nullopt;
  return static_cast<double>(fixed) / static_cast<double>(unsafe);
}

double diversity(std::span<const std::string> tokens) {
  double product = 1.0;
  for (std::size_t n = 2; n <= 4; ++n) {
    if (tokens.size() < n) continue;
    std::set<std::vector<std::string>> unique;
    const std::size_t total = tokens.size() - n + 1;
    for (std::size_t i = 0; i < total; ++i) unique.emplace(tokens.begin() + i, tokens.begin() + i + n);
    product *= static_cast<double>(unique.size()) / static_cast<double>(total);
  }
  return product;
}

std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::optional<double> coherence(const LatentPoint& prompt_embedding, const LatentPoint& response_embedding) {
  require_same_dim(prompt_embedding, response_embedding, "coherence");
  double dot = 0.0;
  for (std::size_t i = 0; i < prompt_embedding.dim(); ++i) dot += prompt_embedding[i] * response_embedding[i];
  const double na = prompt_embedding.norm(), nb = response_embedding.norm();
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double mean_inference_time(std::span<const double> seconds) {
  if (seconds.empty()) throw Error("no inference times");
  double sum = 0.0;
  for (double s : seconds) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error("inference times must be finite and non-negative");
    sum += s;
  }
  return sum / static_cast<double>(seconds.size());
}

}  // namespace latent_reach
