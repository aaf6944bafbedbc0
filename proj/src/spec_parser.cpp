#include "besov/spec_parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace besov::spec {

namespace {

class Parser {
public:
    explicit Parser(const std::string& s) {
        for (char c : s)
            if (!std::isspace(static_cast<unsigned char>(c))) src_.push_back(static_cast<char>(std::tolower(c)));
    }

    Node parse_top() {
        Node n = parse_value();
        if (pos_ != src_.size()) fail("trailing input");
        return n;
    }

    Node parse_value() {
        if (peek() == '[') return parse_list('[', ']');
        if (peek() == '(') return parse_list('(', ')');
        if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') {
            size_t save = pos_;
            std::string id = ident();
            if (id == "i" || id == "pi" || id == "e" || id == "inf") {
                pos_ = save;
                return number_node();
            }
            return spec_rest(id);
        }
        return number_node();
    }

private:
    std::string src_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorKind::ParseError, msg + " at position " + std::to_string(pos_) + " in '" + src_ + "'");
    }
    char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    std::string ident() {
        size_t s = pos_;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
        return src_.substr(s, pos_ - s);
    }

    Node parse_list(char open, char close) {
        expect(open);
        Node n;
        n.kind = Node::Kind::List;
        if (accept(close)) return n;
        while (true) {
            n.items.push_back(parse_value());
            if (accept(close)) break;
            if (!accept(',') && !accept(';')) fail("expected separator in list");
        }
        return n;
    }

    Node spec_rest(const std::string& id) {
        Node n;
        n.kind = Node::Kind::Spec;
        n.name = id;
        if (!accept('(')) return n;
        if (accept(')')) return n;
        while (true) {
            size_t save = pos_;
            if (std::isalpha(static_cast<unsigned char>(peek()))) {
                std::string key = ident();
                if (accept('=')) {
                    n.kwargs.emplace_back(key, parse_value());
                } else {
                    pos_ = save;
                    n.positional.push_back(parse_value());
                }
            } else {
                n.positional.push_back(parse_value());
            }
            if (accept(')')) break;
            if (!accept(',') && !accept(';')) fail("expected ',' or ';'");
        }
        return n;
    }

    Node number_node() {
        Node n;
        n.num = cexpr();
        return n;
    }

    cplx cexpr() {
        cplx v = cterm();
        while (peek() == '+' || peek() == '-') {
            const char op = src_[pos_++];
            const cplx t = cterm();
            v = op == '+' ? v + t : v - t;
        }
        return v;
    }
    cplx cterm() {
        cplx v = cfactor();
        while (peek() == '*' || peek() == '/') {
            const char op = src_[pos_++];
            const cplx t = cfactor();
            v = op == '*' ? v * t : v / t;
        }
        return v;
    }
    cplx cfactor() {
        if (accept('-')) return -cfactor();
        if (accept('+')) return cfactor();
        cplx v;
        if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
            const char* b = src_.c_str() + pos_;
            char* e = nullptr;
            const double d = std::strtod(b, &e);
            if (e == b) fail("bad number");
            pos_ += static_cast<size_t>(e - b);
            v = d;
            if (peek() == 'i' && !std::isalpha(static_cast<unsigned char>(pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0'))) {
                ++pos_;
                v *= cplx(0, 1);
            }
            return v;
        }
        std::string id = ident();
        if (id == "i") return cplx(0, 1);
        if (id == "pi") v = kPi;
        else if (id == "e") v = std::exp(1.0);
        else if (id == "inf") v = kInf;
        else fail("unexpected token '" + id + "'");
        if (peek() == 'i') {
            ++pos_;
            v *= cplx(0, 1);
        }
        return v;
    }
};

}  // namespace

Node parse(const std::string& text) {
    Parser p(text);
    return p.parse_top();
}

const Node* kw(const Node& n, const std::string& key, size_t pos_index) {
    for (const auto& [k, v] : n.kwargs)
        if (k == key) return &v;
    if (pos_index != static_cast<size_t>(-1) && pos_index < n.positional.size()) return &n.positional[pos_index];
    return nullptr;
}

cplx num_of(const Node& n, const std::string& what) {
    if (n.kind != Node::Kind::Number) throw Error(ErrorKind::ParseError, what + " must be a number");
    return n.num;
}

double real_of(const Node& n, const std::string& what) {
    cplx v = num_of(n, what);
    if (v.imag() != 0) throw Error(ErrorKind::InvalidParameter, what + " must be real");
    return v.real();
}

cplx get_c(const Node& n, const std::string& key, size_t idx, std::optional<cplx> def) {
    const Node* v = kw(n, key, idx);
    if (!v) {
        if (def) return *def;
        throw Error(ErrorKind::InvalidParameter, n.name + " requires parameter " + key);
    }
    return num_of(*v, key);
}

double get_r(const Node& n, const std::string& key, size_t idx, std::optional<double> def) {
    const Node* v = kw(n, key, idx);
    if (!v) {
        if (def) return *def;
        throw Error(ErrorKind::InvalidParameter, n.name + " requires parameter " + key);
    }
    return real_of(*v, key);
}

std::vector<Node> as_list(const Node& n) {
    if (n.kind == Node::Kind::List) return n.items;
    return {n};
}

}  // namespace besov::spec
