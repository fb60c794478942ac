// Copyright 2026 The qvol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qvol/circuit.hpp"
#include "qvol/error.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

// Strict subset of OpenQASM 2.0: one header line, one quantum and one classical
// register of equal size, and the gates u1 u2 u3 cx h swap barrier measure.
// A non-identity output permutation is carried by a directive comment:
//   // output_permutation: 1 0 2
namespace qvol {

class QasmError : public Error {
  public:
    QasmError(int line, int column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

inline constexpr std::string_view kQasmHeader = "OPENQASM 2.0;";
inline constexpr std::string_view kPermutationDirective = "output_permutation:";

inline std::string format_angle(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string emit_qasm(const Circuit& c) {
    std::ostringstream os;
    const int m = c.width();
    os << kQasmHeader << '\n' << "qreg q[" << m << "];\n" << "creg c[" << m << "];\n";
    if (c.output_permutation() != identity_permutation(m)) {
        os << "// " << kPermutationDirective;
        for (int v : c.output_permutation()) os << ' ' << v;
        os << '\n';
    }
    for (const auto& g : c.gates()) {
        if (g.kind == GateKind::SU4) throw InvalidArgument("emit_qasm: su4 blocks must be expanded first");
        os << gate_name(g.kind);
        if (!g.params.empty()) {
            os << '(';
            for (std::size_t i = 0; i < g.params.size(); ++i) os << (i ? "," : "") << format_angle(g.params[i]);
            os << ')';
        }
        if (g.kind == GateKind::Measure) {
            os << " q[" << g.qubits[0] << "] -> c[" << g.qubits[0] << "];\n";
            continue;
        }
        os << ' ';
        for (std::size_t i = 0; i < g.qubits.size(); ++i) os << (i ? "," : "") << "q[" << g.qubits[i] << ']';
        os << ";\n";
    }
    return os.str();
}

namespace detail {

class QasmParser {
  public:
    explicit QasmParser(std::string_view text) : src_(text) {}

    Circuit parse() {
        skip_space();
        expect_word("OPENQASM");
        skip_space();
        const auto [vl, vc] = pos();
        const double version = number();
        if (version != 2.0) fail(vl, vc, "unsupported OPENQASM version");
        expect(';');

        std::optional<Circuit> circuit;
        std::string qname, cname;
        int csize = -1;
        std::optional<std::vector<int>> perm;

        while (true) {
            skip_space();
            if (at_end()) break;
            const auto [l, col] = pos();
            const std::string word = identifier();
            if (word == "qreg") {
                if (circuit) fail(l, col, "only one quantum register is supported");
                skip_space();
                qname = identifier();
                const int n = bracket_index();
                if (n < 1) fail(l, col, "register size must be positive");
                expect(';');
                circuit.emplace(n);
            } else if (word == "creg") {
                if (csize >= 0) fail(l, col, "only one classical register is supported");
                skip_space();
                cname = identifier();
                csize = bracket_index();
                expect(';');
            } else {
                if (!circuit) fail(l, col, "gate before qreg declaration");
                if (csize < 0) fail(l, col, "gate before creg declaration");
                if (csize != circuit->width()) fail(l, col, "classical and quantum registers differ in size");
                statement(word, l, col, *circuit, qname, cname);
            }
            if (pending_perm_) {
                perm = std::move(pending_perm_);
                pending_perm_.reset();
            }
        }
        if (pending_perm_) perm = std::move(pending_perm_);
        if (!circuit) fail(line_, col_, "missing qreg declaration");
        if (csize < 0) fail(line_, col_, "missing creg declaration");
        if (perm) {
            if (static_cast<int>(perm->size()) != circuit->width() || !is_permutation(*perm))
                fail(perm_line_, 1, "output_permutation is not a bijection on the register");
            circuit->set_output_permutation(*perm);
        }
        return std::move(*circuit);
    }

  private:
    std::string_view src_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
    std::optional<std::vector<int>> pending_perm_;
    int perm_line_ = 0;

    [[noreturn]] static void fail(int line, int col, const std::string& what) { throw QasmError(line, col, what); }

    std::pair<int, int> pos() const { return {line_, col_}; }
    bool at_end() const { return i_ >= src_.size(); }
    char peek() const { return at_end() ? '\0' : src_[i_]; }

    void advance() {
        if (src_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    void skip_space() {
        while (!at_end()) {
            if (std::isspace(static_cast<unsigned char>(peek()))) {
                advance();
            } else if (src_.substr(i_, 2) == "//") {
                const int l = line_;
                std::size_t end = src_.find('\n', i_);
                if (end == std::string_view::npos) end = src_.size();
                directive(src_.substr(i_ + 2, end - i_ - 2), l);
                while (i_ < end) advance();
            } else {
                break;
            }
        }
    }

    void directive(std::string_view body, int line) {
        while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
        if (body.substr(0, kPermutationDirective.size()) != kPermutationDirective) return;
        if (pending_perm_ || perm_line_ != 0) fail(line, 1, "duplicate output_permutation directive");
        std::istringstream is(std::string(body.substr(kPermutationDirective.size())));
        std::vector<int> p;
        std::string tok;
        while (is >> tok) {
            char* end = nullptr;
            const long v = std::strtol(tok.c_str(), &end, 10);
            if (*end != '\0') fail(line, 1, "malformed output_permutation entry '" + tok + "'");
            p.push_back(static_cast<int>(v));
        }
        pending_perm_ = std::move(p);
        perm_line_ = line;
    }

    void expect(char ch) {
        skip_space();
        if (peek() != ch) fail(line_, col_, std::string("expected '") + ch + "'");
        advance();
    }

    void expect_word(std::string_view w) {
        const auto [l, c] = pos();
        if (identifier() != w) fail(l, c, "expected '" + std::string(w) + "'");
    }

    std::string identifier() {
        skip_space();
        const auto [l, c] = pos();
        std::string out;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
            out.push_back(peek());
            advance();
        }
        if (out.empty()) fail(l, c, "expected identifier");
        return out;
    }

    int bracket_index() {
        expect('[');
        skip_space();
        const auto [l, c] = pos();
        std::string digits;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            digits.push_back(peek());
            advance();
        }
        if (digits.empty()) fail(l, c, "expected integer index");
        expect(']');
        return std::stoi(digits);
    }

    double number() {
        skip_space();
        const auto [l, c] = pos();
        const std::string rest(src_.substr(i_, std::min<std::size_t>(64, src_.size() - i_)));
        char* end = nullptr;
        const double v = std::strtod(rest.c_str(), &end);
        const auto used = static_cast<std::size_t>(end - rest.c_str());
        if (used == 0) fail(l, c, "expected number");
        for (std::size_t k = 0; k < used; ++k) advance();
        return v;
    }

    // expr := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*;
    // unary := '-' unary | '(' expr ')' | 'pi' | number
    double expr() {
        double v = term();
        while (true) {
            skip_space();
            if (peek() == '+') {
                advance();
                v += term();
            } else if (peek() == '-') {
                advance();
                v -= term();
            } else {
                return v;
            }
        }
    }

    double term() {
        double v = unary();
        while (true) {
            skip_space();
            if (peek() == '*') {
                advance();
                v *= unary();
            } else if (peek() == '/') {
                advance();
                v /= unary();
            } else {
                return v;
            }
        }
    }

    double unary() {
        skip_space();
        if (peek() == '-') {
            advance();
            return -unary();
        }
        if (peek() == '+') {
            advance();
            return unary();
        }
        if (peek() == '(') {
            advance();
            const double v = expr();
            expect(')');
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(peek()))) {
            const auto [l, c] = pos();
            if (identifier() != "pi") fail(l, c, "unknown symbol in expression");
            return kPi;
        }
        return number();
    }

    int qubit_ref(const std::string& reg, int width) {
        skip_space();
        const auto [l, c] = pos();
        if (identifier() != reg) fail(l, c, "unknown register");
        const int q = bracket_index();
        if (q >= width) fail(l, c, "qubit index " + std::to_string(q) + " out of range");
        return q;
    }

    void statement(const std::string& word, int line, int col, Circuit& circuit, const std::string& qname,
                   const std::string& cname) {
        static const std::pair<std::string_view, GateKind> kinds[] = {
            {"u1", GateKind::U1}, {"u2", GateKind::U2}, {"u3", GateKind::U3},           {"cx", GateKind::CX},
            {"h", GateKind::H},   {"swap", GateKind::SWAP}, {"barrier", GateKind::Barrier},
            {"measure", GateKind::Measure}};
        std::optional<GateKind> kind;
        for (const auto& [name, k] : kinds)
            if (word == name) kind = k;
        if (!kind) fail(line, col, "unknown gate '" + word + "'");

        Gate g;
        g.kind = *kind;
        skip_space();
        if (peek() == '(') {
            advance();
            skip_space();
            if (peek() != ')') {
                g.params.push_back(expr());
                skip_space();
                while (peek() == ',') {
                    advance();
                    g.params.push_back(expr());
                    skip_space();
                }
            }
            expect(')');
        }
        if (static_cast<int>(g.params.size()) != param_arity(*kind))
            fail(line, col,
                 word + " expects " + std::to_string(param_arity(*kind)) + " parameters, got " +
                     std::to_string(g.params.size()));

        if (*kind == GateKind::Measure) {
            const int q = qubit_ref(qname, circuit.width());
            skip_space();
            if (src_.substr(i_, 2) != "->") fail(line_, col_, "expected '->'");
            advance();
            advance();
            skip_space();
            const auto [l, c] = pos();
            if (identifier() != cname) fail(l, c, "unknown classical register");
            const int b = bracket_index();
            if (b != q) fail(l, c, "measurement must target the clbit with the qubit's index");
            g.qubits = {q};
        } else {
            g.qubits.push_back(qubit_ref(qname, circuit.width()));
            skip_space();
            while (peek() == ',') {
                advance();
                g.qubits.push_back(qubit_ref(qname, circuit.width()));
                skip_space();
            }
        }
        const int qa = qubit_arity(*kind);
        if (qa > 0 && static_cast<int>(g.qubits.size()) != qa)
            fail(line, col,
                 word + " expects " + std::to_string(qa) + " qubits, got " + std::to_string(g.qubits.size()));
        expect(';');
        try {
            circuit.append(std::move(g));
        } catch (const InvalidArgument& e) {
            fail(line, col, e.what());
        }
    }
};

}  // namespace detail

inline Circuit parse_qasm(std::string_view text) { return detail::QasmParser(text).parse(); }

}  // namespace qvol
