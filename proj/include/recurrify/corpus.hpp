#pragma once

#include <map>
#include <string>

#include "recurrify/source_parser.hpp"

namespace recurrify {

// Built-in program texts, keyed by corpus name. The same texts ship as
// corpus/*.src files for use with the CLI.
const std::map<std::string, std::string> &corpus_sources();

// Parses a built-in corpus program; throws std::out_of_range for unknown
// names.
Program load_corpus(const std::string &name);

}  // namespace recurrify
