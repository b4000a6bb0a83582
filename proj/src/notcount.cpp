#include "katena/notcount.hpp"

#include "katena/errors.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace katena::toolkit {

namespace {

bool is_separator(char c) {
    switch (c) {
        case '.':
        case '(':
        case ')':
        case '{':
        case '}':
        case '[':
        case ']':
        case ':':
        case ',':
        case ';':
        case '=':
        case '"':
        case '\'': return true;
        default: return std::isspace(static_cast<unsigned char>(c)) != 0;
    }
}

std::string_view trim_left(std::string_view s) {
    size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

// Blanks /* ... */ spans while keeping newlines so line structure survives.
std::string strip_block_comments(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_block = false;
    for (size_t i = 0; i < text.size(); ++i) {
        if (!in_block && i + 1 < text.size() && text[i] == '/' && text[i + 1] == '*') {
            in_block = true;
            ++i;
            continue;
        }
        if (in_block) {
            if (text[i] == '\n') out.push_back('\n');
            if (i + 1 < text.size() && text[i] == '*' && text[i + 1] == '/') {
                in_block = false;
                ++i;
            }
            continue;
        }
        out.push_back(text[i]);
    }
    return out;
}

std::string drop_js_line(std::string_view line) {
    std::string_view lead = trim_left(line);
    if (lead.starts_with("//")) return "";
    if (lead.starts_with("console.")) return "";  // log statements are not counted
    // Trailing line comment.
    size_t pos = line.find("//");
    if (pos != std::string_view::npos) return std::string(line.substr(0, pos));
    return std::string(line);
}

std::string drop_yaml_line(std::string_view line) {
    std::string_view lead = trim_left(line);
    if (lead.starts_with("#")) return "";
    // Inline comments need leading whitespace before '#'.
    for (size_t i = 1; i < line.size(); ++i) {
        if (line[i] == '#' && std::isspace(static_cast<unsigned char>(line[i - 1]))) {
            return std::string(line.substr(0, i));
        }
    }
    return std::string(line);
}

}  // namespace

std::vector<std::string> tokenize_line(std::string_view line) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : line) {
        if (is_separator(c)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

uint64_t count_tokens(std::string_view text, const std::string& language) {
    if (language != "yaml" && language != "js") {
        throw usage_error("unknown language mode '" + language + "' (expected yaml or js)");
    }
    std::string body = language == "js" ? strip_block_comments(text) : std::string(text);

    uint64_t total = 0;
    std::istringstream lines(body);
    std::string line;
    while (std::getline(lines, line)) {
        std::string kept = language == "js" ? drop_js_line(line) : drop_yaml_line(line);
        total += tokenize_line(kept).size();
    }
    return total;
}

NotCount count_tokens_file(const std::string& path, const std::string& language) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return {path, language, count_tokens(buf.str(), language)};
}

}  // namespace katena::toolkit
