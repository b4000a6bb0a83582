#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace katena::toolkit {

// Number-of-Tokens effort metric over deployment files. Comment lines and
// log-statement lines are removed, the rest splits on whitespace, '.', and
// the structural punctuation ( ) { } [ ] : , ; = " '. The separator set is
// frozen; changing it changes every reported count.
struct NotCount {
    std::string file;
    std::string language;  // "yaml" | "js"
    uint64_t tokens = 0;
};

uint64_t count_tokens(std::string_view text, const std::string& language);
NotCount count_tokens_file(const std::string& path, const std::string& language);

// Exposed for tests.
std::vector<std::string> tokenize_line(std::string_view line);

}  // namespace katena::toolkit
