#pragma once

#include <string>
#include <vector>

#include "aiml/config.hpp"

namespace aiml::cli {

/// Entry point behind main(); parses `subcommand --config FILE [--set k=v]...`
/// and maps the error taxonomy onto the documented exit codes.
int run(int argc, const char* const* argv);

// One function per subcommand; each consumes a flat Config and writes its
// outputs (plus a provenance JSON) under <output.dir>.
void cmd_generate(const Config& cfg);
void cmd_embed(const Config& cfg);
void cmd_knn_eval(const Config& cfg);
void cmd_train_encoder(const Config& cfg);
void cmd_mnist_eval(const Config& cfg);

}  // namespace aiml::cli
