#include "commands.hpp"
#include "io.hpp"

#include "simforge/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int fail(const std::string& type, const std::string& message, std::optional<std::size_t> line = {}) {
    nlohmann::json err{{"type", type}, {"message", message}};
    if (line) err["line"] = *line;
    std::cerr << nlohmann::json{{"error", err}}.dump() << '\n';
    return type == "usage" ? 2 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simforge: text similarity metrics, topic graphs and metric attacks"};
    app.require_subcommand(1);
    simforge::cli::add_score_commands(app);
    simforge::cli::add_topic_commands(app);
    simforge::cli::add_attack_commands(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        return fail("usage", e.what());
    } catch (const simforge::cli::ItemErrors& e) {
        return fail("item_errors", std::to_string(e.count) + " item(s) failed; see per-item output");
    } catch (const simforge::ParseError& e) {
        return fail("parse", e.what(), e.line());
    } catch (const simforge::UndefinedValue& e) {
        return fail("undefined", e.what());
    } catch (const simforge::InvalidArgument& e) {
        return fail("invalid_argument", e.what());
    } catch (const std::exception& e) {
        return fail("error", e.what());
    }
    return 0;
}
