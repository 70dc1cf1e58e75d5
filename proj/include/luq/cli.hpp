#pragma once

namespace luq {

// Exit codes: 0 success, 1 computation failure, 2 usage error.
int run_cli(int argc, char** argv);

}  // namespace luq
