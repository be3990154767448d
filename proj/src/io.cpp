#include "aiml/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aiml/errors.hpp"
#include "json.hpp"

namespace aiml {

namespace {

constexpr char kDatasetMagic[] = "aiml-dataset v1";
constexpr char kWeightsMagic[] = "aiml-weights v1";
constexpr char kEmbeddingMagic[] = "aiml-embedding v1";
constexpr std::uint32_t kCheckpointMagic = 0x41494D43;  // "AIMC"

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

void write_matrix_rows(std::ofstream& out, const Eigen::MatrixXd& mat) {
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(mat(r, c));
    }
    out << '\n';
  }
}

void read_matrix_rows(std::ifstream& in, Eigen::MatrixXd& mat,
                      const std::string& path) {
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      if (!(in >> mat(r, c))) {
        throw ParseError(path + ": truncated table at row " + std::to_string(r));
      }
    }
  }
}

void expect_line(std::ifstream& in, const std::string& expected,
                 const std::string& path) {
  std::string line;
  std::getline(in, line);
  if (line != expected) {
    throw ParseError(path + ": expected '" + expected + "', got '" + line + "'");
  }
}

std::string expect_key(std::ifstream& in, const std::string& key,
                       const std::string& path) {
  std::string k, v;
  if (!(in >> k) || k != key || !std::getline(in >> std::ws, v)) {
    throw ParseError(path + ": expected header key '" + key + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_dataset(const MultiViewDataset& dataset, const std::string& path) {
  auto out = open_out(path);
  out << kDatasetMagic << '\n';
  out << "m " << dataset.m << '\n';
  out << "n " << dataset.n << '\n';
  out << "D " << dataset.dim << '\n';
  if (dataset.spec) {
    const ManifoldSpec& s = *dataset.spec;
    out << "spec " << s.name() << ' ' << format_double(s.major_radius) << ' '
        << format_double(s.minor_radius) << ' ' << format_double(s.radius_signal)
        << ' ' << format_double(s.radius_nuisance) << '\n';
  } else {
    out << "spec none\n";
  }
  out << "seed " << dataset.seed << '\n';
  out << "latents " << (dataset.has_latents() ? 1 : 0) << '\n';
  out << "points\n";
  write_matrix_rows(out, dataset.points);
  if (dataset.has_latents()) {
    out << "hidden\n";
    Eigen::MatrixXd lat(dataset.m, 1 + dataset.n);
    lat.col(0) = dataset.latent_phi;
    lat.rightCols(dataset.n) = dataset.latent_psi;
    write_matrix_rows(out, lat);
  }
  if (!out) throw IoError("write failed for " + path);
}

MultiViewDataset load_dataset(const std::string& path) {
  auto in = open_in(path);
  expect_line(in, kDatasetMagic, path);
  MultiViewDataset ds;
  ds.m = std::stoi(expect_key(in, "m", path));
  ds.n = std::stoi(expect_key(in, "n", path));
  ds.dim = std::stoi(expect_key(in, "D", path));
  const std::string spec_line = expect_key(in, "spec", path);
  if (spec_line != "none") {
    std::istringstream ss(spec_line);
    std::string name;
    double major, minor, rs, rv;
    if (!(ss >> name >> major >> minor >> rs >> rv)) {
      throw ParseError(path + ": bad spec line '" + spec_line + "'");
    }
    ManifoldSpec spec = ManifoldSpec::from_name(name);
    spec.major_radius = major;
    spec.minor_radius = minor;
    spec.radius_signal = rs;
    spec.radius_nuisance = rv;
    ds.spec = spec;
  }
  ds.seed = std::stoull(expect_key(in, "seed", path));
  const bool latents = std::stoi(expect_key(in, "latents", path)) != 0;
  expect_line(in, "points", path);
  ds.points.resize(static_cast<Eigen::Index>(ds.m) * ds.n, ds.dim);
  read_matrix_rows(in, ds.points, path);
  if (latents) {
    std::string line;
    std::getline(in, line);  // finish the last points row
    expect_line(in, "hidden", path);
    Eigen::MatrixXd lat(ds.m, 1 + ds.n);
    read_matrix_rows(in, lat, path);
    ds.latent_phi = lat.col(0);
    ds.latent_psi = lat.rightCols(ds.n);
  }
  return ds;
}

void save_weights(const WeightMatrix& weights, const std::string& path) {
  auto out = open_out(path);
  out << kWeightsMagic << '\n';
  out << "m " << weights.size() << '\n';
  out << "t " << format_double(weights.bandwidth_t) << '\n';
  out << "n_views " << weights.n_views << '\n';
  out << "values\n";
  write_matrix_rows(out, weights.values);
  if (!out) throw IoError("write failed for " + path);
}

WeightMatrix load_weights(const std::string& path) {
  auto in = open_in(path);
  expect_line(in, kWeightsMagic, path);
  WeightMatrix w;
  const int m = std::stoi(expect_key(in, "m", path));
  w.bandwidth_t = std::stod(expect_key(in, "t", path));
  w.n_views = std::stoi(expect_key(in, "n_views", path));
  expect_line(in, "values", path);
  w.values.resize(m, m);
  read_matrix_rows(in, w.values, path);
  return w;
}

void save_embedding(const Embedding& embedding, const std::string& path) {
  auto out = open_out(path);
  out << kEmbeddingMagic << '\n';
  out << "m " << embedding.size() << '\n';
  out << "N " << embedding.components() << '\n';
  out << "coords\n";
  write_matrix_rows(out, embedding.coords);
  out << "basis\n";
  write_matrix_rows(out, embedding.basis);
  if (!out) throw IoError("write failed for " + path);

  nlohmann::json meta;
  meta["method"] = method_name(embedding.method);
  meta["alpha"] = embedding.alpha;
  meta["l"] = embedding.diffusion_time;
  meta["t"] = embedding.bandwidth_t;
  meta["skipped_trivial"] = embedding.skipped_trivial;
  meta["warning"] = embedding.warning;
  meta["eigenvalues"] = std::vector<double>(
      embedding.eigenvalues.data(),
      embedding.eigenvalues.data() + embedding.eigenvalues.size());
  auto meta_out = open_out(path + ".json");
  meta_out << meta.dump(2) << '\n';
}

Embedding load_embedding(const std::string& path) {
  auto in = open_in(path);
  expect_line(in, kEmbeddingMagic, path);
  const int m = std::stoi(expect_key(in, "m", path));
  const int n = std::stoi(expect_key(in, "N", path));
  Embedding emb;
  expect_line(in, "coords", path);
  emb.coords.resize(m, n);
  read_matrix_rows(in, emb.coords, path);
  std::string line;
  std::getline(in, line);
  expect_line(in, "basis", path);
  emb.basis.resize(m, n);
  read_matrix_rows(in, emb.basis, path);

  auto meta_in = open_in(path + ".json");
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ".json: " + e.what());
  }
  const std::string method = meta.at("method").get<std::string>();
  emb.method = method == "diffusion_maps" ? EmbeddingMethod::kDiffusionMaps
                                          : EmbeddingMethod::kLaplacianEigenmaps;
  emb.alpha = meta.at("alpha").get<double>();
  emb.diffusion_time = meta.at("l").get<double>();
  emb.bandwidth_t = meta.at("t").get<double>();
  emb.skipped_trivial = meta.at("skipped_trivial").get<bool>();
  emb.warning = meta.at("warning").get<std::string>();
  const auto ev = meta.at("eigenvalues").get<std::vector<double>>();
  emb.eigenvalues = Eigen::Map<const Eigen::VectorXd>(ev.data(), ev.size());
  return emb;
}

void save_checkpoint(const EncoderParams& params, const std::string& path) {
  params.validate();
  auto out = open_out(path, true);
  auto put_u32 = [&](std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  put_u32(kCheckpointMagic);
  put_u32(1);  // version
  put_u32(params.activation == EncoderParams::kTanh ? 0 : 1);
  put_u32(static_cast<std::uint32_t>(params.layer_dims.size()));
  for (int d : params.layer_dims) put_u32(static_cast<std::uint32_t>(d));
  for (int l = 0; l < params.layer_count(); ++l) {
    out.write(reinterpret_cast<const char*>(params.weights[l].data()),
              static_cast<std::streamsize>(sizeof(double) * params.weights[l].size()));
    out.write(reinterpret_cast<const char*>(params.biases[l].data()),
              static_cast<std::streamsize>(sizeof(double) * params.biases[l].size()));
  }
  if (!out) throw IoError("write failed for " + path);
}

EncoderParams load_checkpoint(const std::string& path) {
  auto in = open_in(path, true);
  auto get_u32 = [&]() {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw ParseError(path + ": truncated checkpoint");
    return v;
  };
  if (get_u32() != kCheckpointMagic) throw ParseError(path + ": bad checkpoint magic");
  if (get_u32() != 1) throw ParseError(path + ": unsupported checkpoint version");
  EncoderParams p;
  p.activation = get_u32() == 0 ? EncoderParams::kTanh : EncoderParams::kIdentity;
  const std::uint32_t n_dims = get_u32();
  if (n_dims < 2 || n_dims > 64) throw ParseError(path + ": bad layer count");
  p.layer_dims.resize(n_dims);
  for (auto& d : p.layer_dims) d = static_cast<int>(get_u32());
  for (std::size_t l = 0; l + 1 < p.layer_dims.size(); ++l) {
    Eigen::MatrixXd w(p.layer_dims[l + 1], p.layer_dims[l]);
    in.read(reinterpret_cast<char*>(w.data()),
            static_cast<std::streamsize>(sizeof(double) * w.size()));
    Eigen::VectorXd b(p.layer_dims[l + 1]);
    in.read(reinterpret_cast<char*>(b.data()),
            static_cast<std::streamsize>(sizeof(double) * b.size()));
    if (!in) throw ParseError(path + ": truncated checkpoint payload");
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  p.validate();
  return p;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  auto out = open_out(path);
  auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(row[i]);
    }
    out << '\n';
  };
  write_row(header);
  for (const auto& row : rows) write_row(row);
  if (!out) throw IoError("write failed for " + path);
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

}  // namespace aiml
