#include "io.hpp"

#include "simforge/error.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace simforge::cli {

void TextOptions::add_to(CLI::App* app) {
    app->add_option("--tokenize", mode, "word, chars or hashtag")
        ->check(CLI::IsMember({"word", "chars", "hashtag"}))
        ->capture_default_str();
    app->add_flag("--lowercase", lowercase, "ASCII-lowercase before tokenizing");
}

TokenSequence TextOptions::tokens(const std::string& text) const {
    TokenizeOptions opts;
    opts.lowercase = lowercase;
    opts.mode = mode == "chars" ? TokenizeMode::chars
              : mode == "hashtag" ? TokenizeMode::hashtag_aware
                                  : TokenizeMode::word;
    return tokenize(text, opts);
}

void EmbeddingOptions::add_to(CLI::App* app) {
    auto* file = app->add_option("--embeddings", path, "text embedding file (token v1 v2 ...)");
    auto* dim = app->add_option("--hashed-dim", hashed_dim, "use hashed token vectors of this size");
    file->excludes(dim);
    app->add_option("--hashed-seed", hashed_seed, "seed for hashed vectors")->capture_default_str();
}

std::unique_ptr<EmbeddingTable> EmbeddingOptions::load() const {
    if (!path.empty()) return std::make_unique<EmbeddingTable>(load_embeddings(std::filesystem::path(path)));
    if (hashed_dim > 0) return std::make_unique<EmbeddingTable>(hashed_embeddings(hashed_dim, hashed_seed));
    return nullptr;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SIMFORGE_SEED"); env != nullptr && *env != '\0') {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw InvalidArgument("SIMFORGE_SEED is not an unsigned integer");
    }
    return 0;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
    std::vector<nlohmann::json> out;
    std::size_t line_no = 0;
    for (const auto& line : read_lines(path)) {
        ++line_no;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ParseError(path + ": expected a JSON object", line_no);
        }
        j["_line"] = line_no;
        out.push_back(std::move(j));
    }
    return out;
}

Output::Output(const std::string& path) : out_(&std::cout) {
    if (!path.empty()) {
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) throw InvalidArgument("cannot write '" + path + "'");
    }
}

} // namespace simforge::cli
