#pragma once

#include <string>

#include "provlab/model.hpp"

namespace provlab {

struct GrammarFile {
  WorkflowGrammar grammar;
  DependencyAssignment lambda; // atomic modules
};

// Grammar files carry the module table, the start symbol, the productions
// (occurrences by name, ports 1-based, edges/boundaries by occurrence
// ordinal) and the atomic dependency matrices as (in,out) pair lists.
GrammarFile parse_grammar(const std::string &text);
std::string serialize_grammar(const GrammarFile &gf);

// View files: expandable module names plus dependency pairs for everything
// that can surface unexpanded under the view.
View parse_view(const WorkflowGrammar &g, const std::string &text);
std::string serialize_view(const WorkflowGrammar &g, const View &v);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &data);

} // namespace provlab
