#pragma once

#include <string>

namespace cbat {

/// Location of a token or node in an input file. Attached to every parse
/// error and to parsed nodes; never part of structural equality.
struct SourceSpan {
    std::string file;
    int line = 0;
    int column = 0;
    int length = 0;

    std::string to_string() const {
        if (line == 0) return file.empty() ? "<unknown>" : file;
        return (file.empty() ? std::string("<input>") : file) + ":" +
               std::to_string(line) + ":" + std::to_string(column);
    }
};

}  // namespace cbat
