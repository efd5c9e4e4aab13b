#pragma once

#include "simforge/embeddings.hpp"
#include "simforge/text.hpp"

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace CLI {
class App;
}

namespace simforge::cli {

struct TextOptions {
    std::string mode = "word";
    bool lowercase = false;

    void add_to(CLI::App* app);
    TokenSequence tokens(const std::string& text) const;
};

struct EmbeddingOptions {
    std::string path;
    std::size_t hashed_dim = 0;
    std::uint64_t hashed_seed = 0;

    void add_to(CLI::App* app);
    bool given() const { return !path.empty() || hashed_dim > 0; }
    /// nullptr when neither option was given.
    std::unique_ptr<EmbeddingTable> load() const;
};

/// --seed when given, else $SIMFORGE_SEED, else 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag);

std::vector<std::string> read_lines(const std::string& path);
std::string read_file(const std::string& path);

/// One JSON object per non-blank line; ParseError carries the line number.
std::vector<nlohmann::json> read_jsonl(const std::string& path);

/// Writes to the file when path is non-empty, otherwise to stdout.
class Output {
public:
    explicit Output(const std::string& path);
    std::ostream& stream() { return file_ ? *file_ : *out_; }
    void line(const nlohmann::json& j) { stream() << j.dump() << '\n'; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

/// Thrown by commands that finished but had per-item failures.
struct ItemErrors {
    std::size_t count;
};

} // namespace simforge::cli
