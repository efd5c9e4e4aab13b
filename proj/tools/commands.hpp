#pragma once

namespace CLI {
class App;
}

namespace simforge::cli {

void add_score_commands(CLI::App& app);   // score, stress, counts
void add_topic_commands(CLI::App& app);   // topics build|assign|eval
void add_attack_commands(CLI::App& app);  // attack sample|bag2seq|trigger|probe|sanitize

} // namespace simforge::cli
