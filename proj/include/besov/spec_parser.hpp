#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "besov/common.hpp"

// Small recursive-descent parser shared by the function, measure and matrix
// family grammars: name(key=value, ...), lists in [] or (), complex arithmetic.
namespace besov::spec {

struct Node {
    enum class Kind { Number, List, Spec } kind = Kind::Number;
    cplx num = 0.0;
    std::vector<Node> items;                          // List
    std::string name;                                 // Spec
    std::vector<std::pair<std::string, Node>> kwargs;  // Spec
    std::vector<Node> positional;                     // Spec
};

Node parse(const std::string& text);

const Node* kw(const Node& n, const std::string& key, size_t pos_index = static_cast<size_t>(-1));
cplx num_of(const Node& n, const std::string& what);
double real_of(const Node& n, const std::string& what);
cplx get_c(const Node& n, const std::string& key, size_t idx, std::optional<cplx> def);
double get_r(const Node& n, const std::string& key, size_t idx, std::optional<double> def);
std::vector<Node> as_list(const Node& n);

}  // namespace besov::spec
