#pragma once

#include <string>
#include <vector>

#include "aiml/encoder.hpp"
#include "aiml/kernel.hpp"
#include "aiml/manifold.hpp"
#include "aiml/spectral.hpp"

namespace aiml {

// All text formats print doubles with "%.17g" so a write/read cycle
// round-trips IEEE doubles exactly and reruns are byte-identical.
// Layouts are documented in the README under "File formats".

std::string format_double(double v);

void save_dataset(const MultiViewDataset& dataset, const std::string& path);
MultiViewDataset load_dataset(const std::string& path);

void save_weights(const WeightMatrix& weights, const std::string& path);
WeightMatrix load_weights(const std::string& path);

/// Coordinates table at `path`, metadata sidecar (JSON: method, alpha, l, t,
/// eigenvalues, warning) at `path` + ".json".
void save_embedding(const Embedding& embedding, const std::string& path);
Embedding load_embedding(const std::string& path);

/// Binary checkpoint: magic, version, activation, layer dims, then row-major
/// 64-bit weights and biases per layer.
void save_checkpoint(const EncoderParams& params, const std::string& path);
EncoderParams load_checkpoint(const std::string& path);

/// RFC-4180-style CSV: fields containing commas, quotes or newlines are
/// quoted with internal quotes doubled.
std::string csv_escape(const std::string& field);
void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

void ensure_directory(const std::string& dir);

}  // namespace aiml
