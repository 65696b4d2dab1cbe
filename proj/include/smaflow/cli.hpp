#pragma once

namespace smaflow {

// Subcommands: run, material-point, validate, audit.
// Exit codes: 0 success, 1 usage or validation failure, 2 solver or audit failure.
int cli_main(int argc, char** argv);

}  // namespace smaflow
