#include "aiml/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "aiml/errors.hpp"
#include "aiml/experiment.hpp"
#include "aiml/io.hpp"
#include "aiml/rng.hpp"
#include "json.hpp"

namespace aiml::cli {

namespace {

std::string output_path(const Config& cfg, const std::string& default_name,
                        const std::string& extension) {
  const std::string dir = cfg.get_string("output.dir", "out");
  ensure_directory(dir);
  const std::string name = cfg.get_string("output.name", default_name);
  return dir + "/" + name + extension;
}

void write_provenance(const Config& cfg, const std::string& command,
                      const std::vector<std::string>& outputs,
                      const std::string& path) {
  nlohmann::json j;
  j["command"] = command;
  j["outputs"] = outputs;
  nlohmann::json conf;
  for (const auto& [key, value] : cfg.entries()) conf[key] = value;
  j["config"] = conf;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

ManifoldSpec manifold_from(const Config& cfg) {
  ManifoldSpec spec = ManifoldSpec::from_name(cfg.get_string("data.manifold"));
  if (cfg.has("data.major_radius")) spec.major_radius = cfg.get_double("data.major_radius");
  if (cfg.has("data.minor_radius")) spec.minor_radius = cfg.get_double("data.minor_radius");
  if (cfg.has("data.radius_signal")) spec.radius_signal = cfg.get_double("data.radius_signal");
  if (cfg.has("data.radius_nuisance")) spec.radius_nuisance = cfg.get_double("data.radius_nuisance");
  spec.validate();
  return spec;
}

BandwidthRule bandwidth_rule_from(const Config& cfg, const std::string& prefix,
                                  int intrinsic_dim) {
  const std::string rule = cfg.get_string(prefix + ".t_rule", "median");
  const int d = static_cast<int>(cfg.get_int(prefix + ".t_dim", intrinsic_dim));
  BandwidthRule out = BandwidthRule::from_name(rule, d);
  if (out.kind == BandwidthRule::kMedianHeuristic) {
    out.scale = cfg.get_double(prefix + ".t_scale", 1.0);
  }
  return out;
}

MultiViewDataset dataset_from(const Config& cfg) {
  if (cfg.has("data.dataset")) return load_dataset(cfg.get_string("data.dataset"));
  const ManifoldSpec spec = manifold_from(cfg);
  return generate_dataset(spec, static_cast<int>(cfg.get_int("data.m")),
                          static_cast<int>(cfg.get_int("data.n")),
                          cfg.get_uint("data.seed", 1));
}

double resolve_bandwidth(const Config& cfg, const std::string& prefix,
                         const MultiViewDataset& ds) {
  if (cfg.has(prefix + ".t")) return cfg.get_double(prefix + ".t");
  const int d = ds.spec ? ds.spec->intrinsic_dim() : 2;
  return bandwidth_heuristic(ds, bandwidth_rule_from(cfg, prefix, d),
                             Rng::derive(ds.seed, {0xb4ULL}));
}

}  // namespace

void cmd_generate(const Config& cfg) {
  const ManifoldSpec spec = manifold_from(cfg);
  const MultiViewDataset ds =
      generate_dataset(spec, static_cast<int>(cfg.get_int("data.m")),
                       static_cast<int>(cfg.get_int("data.n")),
                       cfg.get_uint("data.seed", 1));
  const std::string path = output_path(cfg, "dataset", ".txt");
  save_dataset(ds, path);
  write_provenance(cfg, "generate", {path}, path + ".provenance.json");
  std::cout << "wrote " << path << " (" << ds.m << " samples x " << ds.n
            << " views)\n";
}

void cmd_embed(const Config& cfg) {
  const MultiViewDataset ds = dataset_from(cfg);
  const double t = resolve_bandwidth(cfg, "embedding", ds);
  const WeightMatrix w = integrated_weights(ds, t);
  const int n_components = static_cast<int>(cfg.get_int("embedding.N", 2));
  const std::string method = cfg.get_string("embedding.method", "le");

  Embedding emb;
  if (method == "le") {
    emb = laplacian_eigenmaps(w, n_components);
  } else if (method == "dm") {
    emb = diffusion_maps(w, n_components, cfg.get_double("embedding.alpha", 1.0),
                         cfg.get_double("embedding.l", 0.1));
  } else {
    throw ConfigError("embedding.method must be le or dm, got '" + method + "'");
  }

  const std::string path = output_path(cfg, "embedding", ".txt");
  save_embedding(emb, path);
  std::vector<std::string> outputs = {path, path + ".json"};

  if (cfg.get_bool("embedding.save_weights", false)) {
    const std::string wpath = output_path(cfg, "weights", ".txt");
    save_weights(w, wpath);
    outputs.push_back(wpath);
  }

  // Scatter table for Fig-style plots: coordinates plus the hidden latents.
  if (ds.has_latents()) {
    std::vector<std::string> header;
    for (int k = 0; k < n_components; ++k) header.push_back("coord_" + std::to_string(k + 1));
    header.push_back("phi");
    header.push_back("psi");
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < ds.m; ++i) {
      std::vector<std::string> row;
      for (int k = 0; k < n_components; ++k) row.push_back(format_double(emb.coords(i, k)));
      row.push_back(format_double(ds.latent_phi(i)));
      row.push_back(format_double(ds.latent_psi(i, 0)));
      rows.push_back(std::move(row));
    }
    const std::string scatter = output_path(cfg, "embedding", ".scatter.csv");
    write_csv(scatter, header, rows);
    outputs.push_back(scatter);
  }
  write_provenance(cfg, "embed", outputs, path + ".provenance.json");
  std::cout << "wrote " << path << " (m=" << emb.size() << ", N=" << n_components
            << ", t=" << t << ")\n";
  if (!emb.warning.empty()) std::cerr << "warning: " << emb.warning << '\n';
}

void cmd_knn_eval(const Config& cfg) {
  ComparisonConfig xc;
  xc.manifold = manifold_from(cfg);
  xc.m = static_cast<int>(cfg.get_int("data.m", 400));
  xc.n = static_cast<int>(cfg.get_int("data.n", 3));
  xc.n_components = static_cast<int>(cfg.get_int("embedding.N", 2));
  xc.bandwidth_rule = bandwidth_rule_from(cfg, "embedding", xc.manifold.intrinsic_dim());
  xc.s_list = cfg.get_int_list("knn.s_list", {50, 100, 200, 300});
  xc.delta_list = cfg.get_int_list("knn.delta_list", {1});
  xc.repeats = static_cast<int>(cfg.get_int("knn.repeats", 100));
  xc.test_size = static_cast<int>(cfg.get_int("knn.test_size", 100));
  xc.master_seed = cfg.get_uint("data.seed", 1);
  if (cfg.get_string("knn.k_rule", "rate") == "fixed") {
    xc.knn_raw = KnnConfig::fixed(static_cast<int>(cfg.get_int("knn.k")));
    xc.knn_spectral = xc.knn_raw;
    xc.knn_defaults = false;
  }

  const auto results = run_comparison_experiment(xc);
  const std::string path = output_path(cfg, "knn_results", ".csv");
  write_csv(path, kResultsHeader, results_to_rows(results));
  write_provenance(cfg, "knn-eval", {path}, path + ".provenance.json");
  std::cout << "wrote " << path << " (" << results.size() << " cells, "
            << xc.repeats << " repeats)\n";
}

void cmd_train_encoder(const Config& cfg) {
  const MultiViewDataset ds = dataset_from(cfg);
  LossConfig loss_cfg;
  loss_cfg.lambda1 = cfg.get_double("encoder.lambda1", 100.0);
  loss_cfg.lambda2 = cfg.get_double("encoder.lambda2", 200.0);
  loss_cfg.bandwidth_t = resolve_bandwidth(cfg, "encoder", ds);
  loss_cfg.batch_size = static_cast<int>(cfg.get_int("encoder.batch_size", 50));
  loss_cfg.learning_rate = cfg.get_double("encoder.learning_rate", 5e-7);
  loss_cfg.epochs = static_cast<int>(cfg.get_int("encoder.epochs", 200));
  loss_cfg.seed = cfg.get_uint("data.seed", 1);

  std::vector<int> dims = {ds.dim};
  for (int h : cfg.get_int_list("encoder.hidden", {64, 64})) dims.push_back(h);
  dims.push_back(static_cast<int>(cfg.get_int("encoder.N", 2)));

  const TrainResult result = train(ds, dims, loss_cfg);
  const std::string ckpt = output_path(cfg, "encoder", ".ckpt");
  save_checkpoint(result.params, ckpt);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t e = 0; e < result.trajectory.size(); ++e) {
    const auto& lb = result.trajectory[e];
    rows.push_back({std::to_string(e), format_double(lb.total),
                    format_double(lb.unsupervised),
                    format_double(lb.self_supervised),
                    format_double(lb.regularization)});
  }
  const std::string traj = output_path(cfg, "encoder", ".loss.csv");
  write_csv(traj, {"epoch", "total", "unsup", "selfsup", "reg"}, rows);

  // Provenance records the effective hyperparameters, not just the overrides.
  Config effective = cfg;
  effective.set("encoder.lambda1", format_double(loss_cfg.lambda1));
  effective.set("encoder.lambda2", format_double(loss_cfg.lambda2));
  effective.set("encoder.t", format_double(loss_cfg.bandwidth_t));
  effective.set("encoder.batch_size", std::to_string(loss_cfg.batch_size));
  effective.set("encoder.learning_rate", format_double(loss_cfg.learning_rate));
  effective.set("encoder.epochs", std::to_string(loss_cfg.epochs));
  write_provenance(effective, "train-encoder", {ckpt, traj},
                   ckpt + ".provenance.json");
  std::cout << "wrote " << ckpt << " (" << loss_cfg.epochs << " epochs)\n";
}

void cmd_mnist_eval(const Config& cfg) {
  MnistConfig mc;
  mc.train_images = cfg.get_string("mnist.train_images");
  mc.train_labels = cfg.get_string("mnist.train_labels");
  mc.test_images = cfg.get_string("mnist.test_images");
  mc.test_labels = cfg.get_string("mnist.test_labels");
  if (cfg.has("mnist.augmentations")) {
    mc.augmentations.clear();
    std::istringstream in(cfg.get_string("mnist.augmentations"));
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!item.empty()) mc.augmentations.push_back(item);
    }
  }
  mc.corpus_size = static_cast<int>(cfg.get_int("mnist.corpus_size", 1000));
  mc.corpus_views = static_cast<int>(cfg.get_int("mnist.views", 7));
  mc.n_components = static_cast<int>(cfg.get_int("mnist.N", 16));
  mc.s_list = cfg.get_int_list("mnist.s_list", {50, 100, 200, 400});
  mc.repeats = static_cast<int>(cfg.get_int("mnist.repeats", 100));
  mc.test_size = static_cast<int>(cfg.get_int("mnist.test_size", 100));
  mc.knn_k = static_cast<int>(cfg.get_int("mnist.k", 5));
  mc.include_encoder = cfg.get_bool("mnist.include_encoder", false);
  mc.encoder_corpus = static_cast<int>(cfg.get_int("mnist.encoder_corpus", 10000));
  mc.encoder_views = static_cast<int>(cfg.get_int("mnist.encoder_views", 2));
  mc.encoder_hidden = cfg.get_int_list("encoder.hidden", {256, 64});
  mc.encoder_loss.lambda1 = cfg.get_double("encoder.lambda1", 100.0);
  mc.encoder_loss.lambda2 = cfg.get_double("encoder.lambda2", 200.0);
  mc.encoder_loss.batch_size = static_cast<int>(cfg.get_int("encoder.batch_size", 128));
  mc.encoder_loss.learning_rate = cfg.get_double("encoder.learning_rate", 5e-7);
  mc.encoder_loss.epochs = static_cast<int>(cfg.get_int("encoder.epochs", 20));
  mc.master_seed = cfg.get_uint("data.seed", 1);

  std::vector<std::string> outputs;
  if (cfg.get_bool("mnist.save_corpus", false)) {
    // export the augmented corpora in the dataset serialization
    for (const auto& aug : mc.augmentations) {
      const std::string dpath = output_path(cfg, "corpus_" + aug, ".txt");
      save_dataset(mnist_corpus_dataset(mc, aug), dpath);
      outputs.push_back(dpath);
    }
  }

  const auto results = run_mnist_experiment(mc);
  const std::string path = output_path(cfg, "mnist_results", ".csv");
  write_csv(path, kResultsHeader, results_to_rows(results));
  outputs.insert(outputs.begin(), path);
  write_provenance(cfg, "mnist-eval", outputs, path + ".provenance.json");
  std::cout << "wrote " << path << '\n';
}

int run(int argc, const char* const* argv) {
  CLI::App app{"augmentation-invariant manifold learning toolkit"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config_path;
    std::vector<std::string> overrides;
  };
  std::map<std::string, std::pair<CLI::App*, SubArgs>> subs;
  const std::vector<std::pair<std::string, std::string>> names = {
      {"generate", "generate a multi-view manifold dataset"},
      {"embed", "compute a spectral embedding of a dataset"},
      {"knn-eval", "run the simulation kNN comparison grid"},
      {"train-encoder", "train the triplet-objective encoder"},
      {"mnist-eval", "run the handwritten-digits comparison"}};
  for (const auto& [name, desc] : names) {
    CLI::App* sub = app.add_subcommand(name, desc);
    auto& args = subs[name];
    args.first = sub;
    sub->add_option("--config", args.second.config_path, "config file (key = value)");
    sub->add_option("--set", args.second.overrides, "override: key=value")
        ->take_all();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    for (auto& [name, entry] : subs) {
      if (!entry.first->parsed()) continue;
      Config cfg = entry.second.config_path.empty()
                       ? Config{}
                       : Config::parse_file(entry.second.config_path);
      for (const auto& o : entry.second.overrides) cfg.set(o);
      if (name == "generate") cmd_generate(cfg);
      else if (name == "embed") cmd_embed(cfg);
      else if (name == "knn-eval") cmd_knn_eval(cfg);
      else if (name == "train-encoder") cmd_train_encoder(cfg);
      else if (name == "mnist-eval") cmd_mnist_eval(cfg);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitParse;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const TrainingError& e) {
    std::cerr << "training error: " << e.what() << '\n';
    return kExitTraining;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace aiml::cli
