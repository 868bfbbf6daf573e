#include <csignal>
#include <iostream>

#include "dialogos/app/cli.hpp"

namespace {

extern "C" void on_signal(int) { dialogos::app::request_shutdown(); }

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    return dialogos::app::cli_main(argc, argv, std::cin, std::cout, std::cerr);
}
