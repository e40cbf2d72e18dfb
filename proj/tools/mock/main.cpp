#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "mock_server.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Mock chat-completion / predict endpoint"};
    uiground::mock::MockConfig cfg;
    std::string host = "127.0.0.1";
    int port = 8089;
    app.add_option("--host", host);
    app.add_option("--port", port, "0 picks a free port")->capture_default_str();
    app.add_option("--reply", cfg.reply, "assistant text for chat requests");
    app.add_option("--predict-body", cfg.predict_body, "JSON body for /predict");
    app.add_option("--fail-first", cfg.fail_first);
    app.add_flag("--always-fail", cfg.always_fail);
    app.add_option("--fail-status", cfg.fail_status);
    app.add_option("--delay-ms", cfg.delay_ms);
    CLI11_PARSE(app, argc, argv);

    // Block the shutdown signals before the server thread starts so only sigwait sees them.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    try {
        uiground::mock::MockServer server(cfg, host, port);
        std::cout << server.url() << std::endl;
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
