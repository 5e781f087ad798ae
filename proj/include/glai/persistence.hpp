#pragma once
#include <string>

#include "glai/estimator.hpp"
#include "glai/pattern.hpp"

namespace glai {

// GLAI/1: line-oriented UTF-8 model files.
//
//   GLAI/1 <kind>          kind: network | patterns | estimator
//   spec <sizes...>
//   seed <u64>
//   then per kind:
//     network    weights l r c, r lines of c values; biases l n, one line
//     patterns   masks n, then per sample one 0/1 string per hidden layer
//     estimator  pw n, one value per line (table rebuilt from spec on load)
//
// Doubles are rendered shortest-round-trip (to_chars, general, 17 significant
// digits), so load(save(x)) is bit-exact and saving twice is byte-identical.
// Files are written to a temp file and renamed; no partial output.

enum class ModelKind { Network, Patterns, Estimator };

ModelKind peek_kind(const std::string& path);

void save(const Network& net, const std::string& path);
void save(const PatternSet& ps, const std::string& path);
void save(const LinearEstimator& est, const std::string& path);

Network load_network(const std::string& path);
PatternSet load_patterns(const std::string& path);
LinearEstimator load_estimator(const std::string& path);

}  // namespace glai
