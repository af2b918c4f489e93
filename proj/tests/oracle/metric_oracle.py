#!/usr/bin/env python3
"""Independent re-computation of every per-file and per-function metric.

This is the oracle side of the metric test suite: a from-scratch lexer,
parser and metric calculator for the same C subset, written against the
project's normative rules (docs/frontend.md). It shares no code with the
C++ implementation. Run it over the fixture corpus to (re)generate
tests/data/metric_oracle.json; the acceptance suite compares the C++
pipeline against those frozen tables.

Usage:
  metric_oracle.py FIXTURE_DIR OUT_JSON        regenerate oracle tables
  metric_oracle.py FIXTURE_DIR --vocab N       print top-N bigram vocabulary
"""

import json
import math
import sys
from collections import Counter

KEYWORDS = {
    "auto", "break", "case", "char", "const", "continue", "default", "do",
    "double", "else", "enum", "extern", "float", "for", "goto", "if",
    "inline", "int", "long", "register", "restrict", "return", "short",
    "signed", "sizeof", "static", "struct", "switch", "typedef", "union",
    "unsigned", "void", "volatile", "while", "_Bool", "_Complex",
    "_Imaginary",
}

SEEDED_TYPES = {
    "size_t", "ssize_t", "ptrdiff_t", "intptr_t", "uintptr_t", "int8_t",
    "int16_t", "int32_t", "int64_t", "uint8_t", "uint16_t", "uint32_t",
    "uint64_t", "FILE", "va_list", "time_t", "clock_t", "off_t", "pid_t",
    "uid_t", "gid_t", "DIR", "socklen_t", "bool", "wchar_t", "intmax_t",
    "uintmax_t",
}

TYPE_KEYWORDS = {
    "void", "char", "short", "int", "long", "float", "double", "signed",
    "unsigned", "_Bool", "_Complex", "_Imaginary",
}
QUALIFIERS = {"const", "volatile", "restrict"}
STORAGE = {"typedef", "extern", "static", "auto", "register", "inline"}
GNU_NOISE = {
    "__attribute__", "__extension__", "__restrict", "__restrict__",
    "__inline", "__inline__", "__volatile__", "__const", "__signed__",
}

THREE_OPS = ["<<=", ">>=", "...", "->*", "::*"]
TWO_OPS = ["->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&",
           "||", "+=", "-=", "*=", "/=", "%=", "&=", "^=", "|="]
SINGLES = "+-*/%&|^~!<>=?:.,;()[]{}#"
PUNCT_TEXT = {"(", ")", "{", "}", "[", "]", ",", ";"}

WS = " \t\n\r\v\f"

NODE_KINDS = [
    "TranslationUnit", "FunctionDef", "ParamList", "Param", "CompoundStmt",
    "Decl", "If", "Else", "For", "While", "DoWhile", "Switch", "Case",
    "Default", "Return", "Break", "Continue", "Goto", "Label", "ExprStmt",
    "Call", "BinaryOp", "UnaryOp", "Ternary", "AssignOp", "Identifier",
    "Literal",
]

HALSTEAD_KEYWORD_OPS = {
    "if", "else", "for", "while", "do", "switch", "case", "return",
    "sizeof", "goto", "break", "continue",
}
HALSTEAD_EXCLUDED = {",", ";", "(", ")", "{", "}"}

CONTROL_KINDS = {"If", "Else", "For", "While", "DoWhile", "Switch"}
DECISION_KINDS = {"If", "For", "While", "DoWhile", "Ternary", "Case"}


class Tok:
    __slots__ = ("kind", "text", "line", "col", "offset", "error")

    def __init__(self, kind, text, line, col, offset, error=False):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col
        self.offset = offset
        self.error = error

    def __repr__(self):
        return f"{self.kind}({self.text!r}@{self.line}:{self.col})"


def tokenize(src):
    toks = []
    pos, line, col = 0, 1, 1
    at_line_start = True
    n = len(src)

    def advance(p, ln, cl):
        nonlocal at_line_start
        if src[p] == "\n":
            at_line_start = True
            return p + 1, ln + 1, 1
        return p + 1, ln, cl + 1

    while pos < n:
        c = src[pos]
        if c in WS:
            pos, line, col = advance(pos, line, col)
            continue
        start, tline, tcol = pos, line, col
        line_start = at_line_start
        at_line_start = False

        if c == "#" and line_start:
            while pos < n and src[pos] != "\n":
                if src[pos] == "\\":
                    pos, line, col = advance(pos, line, col)
                    if pos < n and src[pos] == "\r":
                        pos, line, col = advance(pos, line, col)
                    if pos < n and src[pos] == "\n":
                        pos, line, col = advance(pos, line, col)
                    continue
                pos, line, col = advance(pos, line, col)
            end = pos
            if end > start and src[end - 1] == "\r":
                end -= 1
            toks.append(Tok("PreprocessorLine", src[start:end], tline, tcol, start))
            continue
        if c == "/" and pos + 1 < n and src[pos + 1] == "/":
            while pos < n and src[pos] != "\n":
                if src[pos] == "\\":
                    look = pos + 1
                    if look < n and src[look] == "\r":
                        look += 1
                    if look < n and src[look] == "\n":
                        while pos <= look:
                            pos, line, col = advance(pos, line, col)
                        continue
                pos, line, col = advance(pos, line, col)
            end = pos
            if end > start and src[end - 1] == "\r":
                end -= 1
            toks.append(Tok("Comment", src[start:end], tline, tcol, start))
            continue
        if c == "/" and pos + 1 < n and src[pos + 1] == "*":
            pos, line, col = advance(pos, line, col)
            pos, line, col = advance(pos, line, col)
            closed = False
            while pos < n:
                if src[pos] == "*" and pos + 1 < n and src[pos + 1] == "/":
                    pos, line, col = advance(pos, line, col)
                    pos, line, col = advance(pos, line, col)
                    closed = True
                    break
                pos, line, col = advance(pos, line, col)
            toks.append(Tok("Comment", src[start:pos], tline, tcol, start, not closed))
            continue
        if c in "\"'":
            quote = c
            kind = "StringLiteral" if quote == '"' else "CharLiteral"
            pos, line, col = advance(pos, line, col)
            closed = False
            while pos < n and src[pos] != "\n":
                if src[pos] == "\\":
                    pos, line, col = advance(pos, line, col)
                    if pos < n and src[pos] != "\n":
                        pos, line, col = advance(pos, line, col)
                    continue
                if src[pos] == quote:
                    pos, line, col = advance(pos, line, col)
                    closed = True
                    break
                pos, line, col = advance(pos, line, col)
            toks.append(Tok(kind, src[start:pos], tline, tcol, start, not closed))
            continue
        if c.isdigit() or (c == "." and pos + 1 < n and src[pos + 1].isdigit()):
            is_float = False
            if c == "0" and pos + 1 < n and src[pos + 1] in "xX":
                pos, line, col = advance(pos, line, col)
                pos, line, col = advance(pos, line, col)
                while pos < n and src[pos] in "0123456789abcdefABCDEF":
                    pos, line, col = advance(pos, line, col)
                if pos < n and src[pos] == ".":
                    is_float = True
                    pos, line, col = advance(pos, line, col)
                    while pos < n and src[pos] in "0123456789abcdefABCDEF":
                        pos, line, col = advance(pos, line, col)
                if pos < n and src[pos] in "pP":
                    is_float = True
                    pos, line, col = advance(pos, line, col)
                    if pos < n and src[pos] in "+-":
                        pos, line, col = advance(pos, line, col)
                    while pos < n and src[pos].isdigit():
                        pos, line, col = advance(pos, line, col)
            elif (c == "0" and pos + 2 < n and src[pos + 1] in "bB"
                  and src[pos + 2] in "01"):
                pos, line, col = advance(pos, line, col)
                pos, line, col = advance(pos, line, col)
                while pos < n and src[pos] in "01":
                    pos, line, col = advance(pos, line, col)
            else:
                while pos < n and src[pos].isdigit():
                    pos, line, col = advance(pos, line, col)
                if pos < n and src[pos] == ".":
                    is_float = True
                    pos, line, col = advance(pos, line, col)
                    while pos < n and src[pos].isdigit():
                        pos, line, col = advance(pos, line, col)
                if pos < n and src[pos] in "eE":
                    look = pos + 1
                    if look < n and src[look] in "+-":
                        look += 1
                    if look < n and src[look].isdigit():
                        is_float = True
                        pos, line, col = advance(pos, line, col)
                        if src[pos] in "+-":
                            pos, line, col = advance(pos, line, col)
                        while pos < n and src[pos].isdigit():
                            pos, line, col = advance(pos, line, col)
            while pos < n and (src[pos] in "uUlL"
                               or (src[pos] in "fF" and is_float)):
                pos, line, col = advance(pos, line, col)
            kind = "FloatLiteral" if is_float else "IntLiteral"
            toks.append(Tok(kind, src[start:pos], tline, tcol, start))
            continue
        if c.isalpha() or c == "_":
            while pos < n and (src[pos].isalnum() or src[pos] == "_"):
                pos, line, col = advance(pos, line, col)
            word = src[start:pos]
            kind = "Keyword" if word in KEYWORDS else "Identifier"
            toks.append(Tok(kind, word, tline, tcol, start))
            continue
        rest = src[pos:pos + 3]
        matched = None
        for t in THREE_OPS:
            if rest.startswith(t):
                matched = t
                break
        if matched is None:
            for t in TWO_OPS:
                if rest.startswith(t):
                    matched = t
                    break
        if matched is not None:
            for _ in matched:
                pos, line, col = advance(pos, line, col)
            toks.append(Tok("Operator", matched, tline, tcol, start))
            continue
        pos, line, col = advance(pos, line, col)
        text = src[start:pos]
        if text in SINGLES:
            kind = "Punctuator" if text in PUNCT_TEXT else "Operator"
            toks.append(Tok(kind, text, tline, tcol, start))
        else:
            toks.append(Tok("Operator", text, tline, tcol, start, True))
    return toks


class Node:
    __slots__ = ("kind", "children", "first", "last", "text", "decl_names")

    def __init__(self, kind):
        self.kind = kind
        self.children = []
        self.first = -1
        self.last = -1
        self.text = ""
        self.decl_names = []


class Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.stream = [i for i, t in enumerate(tokens)
                       if t.kind not in ("Comment", "PreprocessorLine")]
        self.pos = 0
        self.diags = []
        self.known_types = set(SEEDED_TYPES)

    # -- stream helpers

    def eof(self):
        return self.pos >= len(self.stream)

    def tk(self, ahead=0):
        return self.tokens[self.stream[self.pos + ahead]]

    def has(self, ahead):
        return self.pos + ahead < len(self.stream)

    def text(self, ahead=0):
        return self.tk(ahead).text if self.has(ahead) else ""

    def kind(self, ahead=0):
        return self.tk(ahead).kind

    def orig(self, fpos):
        return self.stream[fpos]

    def last_orig(self):
        return self.stream[self.pos - 1] if self.pos > 0 else -1

    def next(self):
        self.pos += 1

    def accept(self, t):
        if not self.eof() and self.text() == t:
            self.next()
            return True
        return False

    def expect(self, t, where):
        if not self.accept(t):
            self.diag(f"expected '{t}' {where}")

    def diag(self, msg):
        if self.eof():
            line = self.tokens[-1].line if self.tokens else 1
        else:
            line = self.tk().line
        self.diags.append((line, msg))

    def sync(self):
        depth = 0
        first = True
        while not self.eof():
            t = self.text()
            if t == "{":
                depth += 1
            elif t == "}":
                if depth == 0:
                    if first:
                        self.next()
                    return
                depth -= 1
            elif t == ";" and depth == 0:
                self.next()
                return
            self.next()
            first = False

    def span(self, node, start):
        node.first = self.orig(start)
        node.last = self.last_orig()

    def is_known_type(self, name):
        return name in self.known_types

    def at_decl_start(self):
        if self.eof():
            return False
        if self.kind() == "Keyword":
            t = self.text()
            return (t in TYPE_KEYWORDS or t in QUALIFIERS or t in STORAGE
                    or t in ("struct", "union", "enum"))
        if self.kind() == "Identifier":
            return self.is_known_type(self.text()) or self.text() in GNU_NOISE
        return False

    def consume_balanced(self, open_t, close_t):
        if not self.accept(open_t):
            return
        depth = 1
        while not self.eof() and depth > 0:
            if self.text() == open_t:
                depth += 1
            elif self.text() == close_t:
                depth -= 1
            self.next()
        if depth > 0:
            self.diag(f"unterminated '{open_t}'")

    # -- declarations

    def parse_decl_specifiers(self):
        any_seen = False
        is_typedef = False
        saw_typename = False
        while not self.eof():
            t = self.text()
            if self.kind() == "Keyword":
                if t in STORAGE:
                    if t == "typedef":
                        is_typedef = True
                    self.next()
                    any_seen = True
                    continue
                if t in QUALIFIERS or t in TYPE_KEYWORDS:
                    self.next()
                    any_seen = True
                    continue
                if t in ("struct", "union", "enum"):
                    self.next()
                    any_seen = True
                    if not self.eof() and self.kind() == "Identifier":
                        self.next()
                    if not self.eof() and self.text() == "{":
                        self.consume_balanced("{", "}")
                    continue
                break
            if self.kind() == "Identifier":
                if t in GNU_NOISE:
                    self.next()
                    if not self.eof() and self.text() == "(":
                        self.consume_balanced("(", ")")
                    continue
                if not saw_typename and self.is_known_type(t):
                    self.next()
                    any_seen = True
                    saw_typename = True
                    continue
                break
            break
        return any_seen, is_typedef

    def parse_declarator(self):
        d = {"name": "", "name_fidx": -1, "is_function": False,
             "params": None, "array_sizes": []}
        while (not self.eof()
               and (self.text() == "*"
                    or (self.kind() == "Keyword" and self.text() in QUALIFIERS)
                    or (self.kind() == "Identifier"
                        and self.text() in GNU_NOISE))):
            self.next()
        if (not self.eof() and self.text() == "(" and self.has(1)
                and self.text(1) in ("*", "(")):
            self.next()
            inner = self.parse_declarator()
            self.expect(")", "after grouped declarator")
            d["name"] = inner["name"]
            d["name_fidx"] = inner["name_fidx"]
            d["is_function"] = inner["is_function"]
            if inner["params"] is not None:
                d["params"] = inner["params"]
            d["array_sizes"].extend(inner["array_sizes"])
        elif not self.eof() and self.kind() == "Identifier":
            d["name"] = self.text()
            d["name_fidx"] = self.pos
            self.next()
        while not self.eof():
            if self.text() == "(":
                d["is_function"] = True
                d["params"] = self.parse_param_list()
            elif self.text() == "[":
                self.next()
                if not self.eof() and self.text() != "]":
                    sz = self.parse_assignment()
                    if sz is not None:
                        d["array_sizes"].append(sz)
                self.expect("]", "after array size")
            else:
                break
        return d

    def parse_param_list(self):
        start = self.pos
        params = Node("ParamList")
        self.expect("(", "to open parameter list")
        if self.accept(")"):
            self.span(params, start)
            return params
        if not self.eof() and self.text() == "void" and self.text(1) == ")":
            self.next()
            self.next()
            self.span(params, start)
            return params
        while not self.eof():
            if self.text() == "...":
                self.next()
            else:
                pstart = self.pos
                self.parse_decl_specifiers()
                d = self.parse_declarator()
                if self.pos == pstart:
                    self.diag("cannot parse parameter")
                    break
                p = Node("Param")
                p.text = d["name"]
                self.span(p, pstart)
                params.children.append(p)
            if not self.accept(","):
                break
        self.expect(")", "to close parameter list")
        self.span(params, start)
        return params

    def parse_initializer_into(self, children):
        if not self.eof() and self.text() == "{":
            self.next()
            while not self.eof() and self.text() != "}":
                if self.text() == ".":
                    self.next()
                    if not self.eof() and self.kind() == "Identifier":
                        self.next()
                    self.accept("=")
                elif self.text() == "[":
                    self.next()
                    self.parse_assignment()
                    self.expect("]", "after designator index")
                    self.accept("=")
                self.parse_initializer_into(children)
                if not self.accept(","):
                    break
            self.expect("}", "to close initializer list")
            return
        e = self.parse_assignment()
        if e is not None:
            children.append(e)
        else:
            self.diag("expected initializer expression")

    def parse_decl_tail(self, is_typedef, start, first=None):
        decl = Node("Decl")
        if first is None and self.accept(";"):
            self.span(decl, start)
            return decl
        more = True
        first_iter = True
        while more and not self.eof():
            if first_iter and first is not None:
                d = first
            else:
                d = self.parse_declarator()
                if (first_iter and not d["name"] and not d["array_sizes"]
                        and not d["is_function"]):
                    self.diag("expected declarator")
                    self.sync()
                    self.span(decl, start)
                    return decl
            first_iter = False
            if d["name"]:
                ident = Node("Identifier")
                ident.text = d["name"]
                if d["name_fidx"] >= 0:
                    ident.first = self.orig(d["name_fidx"])
                    ident.last = ident.first
                decl.children.append(ident)
                decl.decl_names.append(d["name"])
            decl.children.extend(d["array_sizes"])
            if self.accept("="):
                self.parse_initializer_into(decl.children)
            more = self.accept(",")
        self.expect(";", "after declaration")
        if is_typedef:
            for nm in decl.decl_names:
                self.known_types.add(nm)
            decl.decl_names = []
        self.span(decl, start)
        return decl

    def parse_external(self):
        start = self.pos
        if self.at_decl_start() or self.kind() == "Identifier":
            any_seen, is_typedef = self.parse_decl_specifiers()
            if not any_seen and self.kind(0) != "Identifier":
                self.diag("cannot parse top-level construct")
                self.sync()
                return None
            d = self.parse_declarator()
            if d["is_function"] and not self.eof() and self.text() == "{":
                fn = Node("FunctionDef")
                fn.text = d["name"]
                params = d["params"] if d["params"] is not None else Node("ParamList")
                fn.children.append(params)
                fn.children.append(self.parse_compound())
                self.span(fn, start)
                return fn
            if not any_seen and not d["name"]:
                self.diag("cannot parse top-level construct")
                self.sync()
                return None
            return self.parse_decl_tail(is_typedef, start, first=d)
        self.diag("cannot parse top-level construct")
        self.sync()
        return None

    # -- statements

    def parse_compound(self):
        start = self.pos
        block = Node("CompoundStmt")
        self.expect("{", "to open block")
        while not self.eof() and self.text() != "}":
            before = self.pos
            stmt = self.parse_statement()
            if stmt is not None:
                block.children.append(stmt)
            if self.pos == before:
                self.sync()
        self.expect("}", "to close block")
        self.span(block, start)
        return block

    def parse_statement(self):
        if self.eof():
            return None
        start = self.pos
        t = self.text()
        if t == "{":
            return self.parse_compound()
        if t == ";":
            self.next()
            node = Node("ExprStmt")
            self.span(node, start)
            return node
        if self.kind() == "Keyword":
            if t == "if":
                return self.parse_if(start)
            if t == "while":
                return self.parse_while(start)
            if t == "do":
                return self.parse_do(start)
            if t == "for":
                return self.parse_for(start)
            if t == "switch":
                return self.parse_switch(start)
            if t == "return":
                return self.parse_return(start)
            if t in ("break", "continue"):
                node = Node("Break" if t == "break" else "Continue")
                self.next()
                self.expect(";", "after jump statement")
                self.span(node, start)
                return node
            if t == "goto":
                node = Node("Goto")
                self.next()
                if not self.eof() and self.kind() == "Identifier":
                    node.text = self.text()
                    self.next()
                else:
                    self.diag("expected label after goto")
                self.expect(";", "after goto")
                self.span(node, start)
                return node
            if t == "case":
                node = Node("Case")
                self.next()
                value = self.parse_ternary()
                if value is not None:
                    node.children.append(value)
                else:
                    self.diag("expected case value")
                self.expect(":", "after case value")
                if not self.eof() and self.text() != "}":
                    body = self.parse_statement()
                    if body is not None:
                        node.children.append(body)
                self.span(node, start)
                return node
            if t == "default":
                node = Node("Default")
                self.next()
                self.expect(":", "after default")
                if not self.eof() and self.text() != "}":
                    body = self.parse_statement()
                    if body is not None:
                        node.children.append(body)
                self.span(node, start)
                return node
            if self.at_decl_start():
                return self.parse_local_decl(start)
            self.diag(f"unexpected keyword '{t}'")
            self.sync()
            return None
        if self.kind() == "Identifier" and self.has(1) and self.text(1) == ":":
            node = Node("Label")
            node.text = t
            self.next()
            self.next()
            if not self.eof() and self.text() != "}":
                body = self.parse_statement()
                if body is not None:
                    node.children.append(body)
            self.span(node, start)
            return node
        if self.at_decl_start():
            return self.parse_local_decl(start)
        return self.parse_expr_statement(start)

    def parse_local_decl(self, start):
        _, is_typedef = self.parse_decl_specifiers()
        return self.parse_decl_tail(is_typedef, start)

    def parse_expr_statement(self, start):
        e = self.parse_expression()
        if e is None:
            self.diag("cannot parse statement")
            self.sync()
            return None
        node = Node("ExprStmt")
        node.children.append(e)
        self.expect(";", "after expression")
        self.span(node, start)
        return node

    def parse_if(self, start):
        node = Node("If")
        self.next()
        self.expect("(", "after if")
        cond = self.parse_expression()
        if cond is not None:
            node.children.append(cond)
        else:
            self.diag("expected condition")
        self.expect(")", "after condition")
        then = self.parse_statement()
        if then is not None:
            node.children.append(then)
        if not self.eof() and self.text() == "else":
            estart = self.pos
            els = Node("Else")
            self.next()
            body = self.parse_statement()
            if body is not None:
                els.children.append(body)
            self.span(els, estart)
            node.children.append(els)
        self.span(node, start)
        return node

    def parse_while(self, start):
        node = Node("While")
        self.next()
        self.expect("(", "after while")
        cond = self.parse_expression()
        if cond is not None:
            node.children.append(cond)
        else:
            self.diag("expected condition")
        self.expect(")", "after condition")
        body = self.parse_statement()
        if body is not None:
            node.children.append(body)
        self.span(node, start)
        return node

    def parse_do(self, start):
        node = Node("DoWhile")
        self.next()
        body = self.parse_statement()
        if body is not None:
            node.children.append(body)
        self.expect("while", "after do body")
        self.expect("(", "after while")
        cond = self.parse_expression()
        if cond is not None:
            node.children.append(cond)
        else:
            self.diag("expected condition")
        self.expect(")", "after condition")
        self.expect(";", "after do/while")
        self.span(node, start)
        return node

    def parse_for(self, start):
        node = Node("For")
        self.next()
        self.expect("(", "after for")
        if not self.accept(";"):
            if self.at_decl_start():
                decl = self.parse_local_decl(self.pos)
                if decl is not None:
                    node.children.append(decl)
            else:
                init = self.parse_expr_statement(self.pos)
                if init is not None:
                    node.children.append(init)
        if not self.eof() and self.text() != ";":
            cond = self.parse_expression()
            if cond is not None:
                node.children.append(cond)
        self.expect(";", "after loop condition")
        if not self.eof() and self.text() != ")":
            step = self.parse_expression()
            if step is not None:
                node.children.append(step)
        self.expect(")", "after for header")
        body = self.parse_statement()
        if body is not None:
            node.children.append(body)
        self.span(node, start)
        return node

    def parse_switch(self, start):
        node = Node("Switch")
        self.next()
        self.expect("(", "after switch")
        cond = self.parse_expression()
        if cond is not None:
            node.children.append(cond)
        else:
            self.diag("expected controlling expression")
        self.expect(")", "after controlling expression")
        body = self.parse_statement()
        if body is not None:
            node.children.append(body)
        self.span(node, start)
        return node

    def parse_return(self, start):
        node = Node("Return")
        self.next()
        if not self.eof() and self.text() != ";":
            e = self.parse_expression()
            if e is not None:
                node.children.append(e)
        self.expect(";", "after return")
        self.span(node, start)
        return node

    # -- expressions

    def parse_expression(self):
        lhs = self.parse_assignment()
        if lhs is None:
            return None
        while not self.eof() and self.text() == ",":
            first = lhs.first
            self.next()
            rhs = self.parse_assignment()
            if rhs is None:
                self.diag("expected expression after ','")
                return lhs
            seq = Node("BinaryOp")
            seq.text = ","
            seq.first = first
            seq.last = self.last_orig()
            seq.children = [lhs, rhs]
            lhs = seq
        return lhs

    ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "^=", "|=",
                  "<<=", ">>="}

    def parse_assignment(self):
        lhs = self.parse_ternary()
        if lhs is None:
            return None
        if not self.eof() and self.text() in self.ASSIGN_OPS:
            node = Node("AssignOp")
            node.text = self.text()
            node.first = lhs.first
            self.next()
            rhs = self.parse_assignment()
            if rhs is None:
                self.diag("expected right-hand side of assignment")
                return lhs
            node.children = [lhs, rhs]
            node.last = self.last_orig()
            return node
        return lhs

    def parse_ternary(self):
        cond = self.parse_binary(0)
        if cond is None:
            return None
        if not self.eof() and self.text() == "?":
            node = Node("Ternary")
            node.first = cond.first
            self.next()
            node.children.append(cond)
            then = self.parse_expression()
            if then is not None:
                node.children.append(then)
            else:
                self.diag("expected expression after '?'")
            self.expect(":", "in conditional expression")
            els = self.parse_assignment()
            if els is not None:
                node.children.append(els)
            else:
                self.diag("expected expression after ':'")
            node.last = self.last_orig()
            return node
        return cond

    BIN_LEVELS = {
        "||": 0, "&&": 1, "|": 2, "^": 3, "&": 4, "==": 5, "!=": 5,
        "<": 6, ">": 6, "<=": 6, ">=": 6, "<<": 7, ">>": 7, "+": 8,
        "-": 8, "*": 9, "/": 9, "%": 9,
    }

    def parse_binary(self, min_level):
        lhs = self.parse_unary()
        if lhs is None:
            return None
        while not self.eof():
            level = self.BIN_LEVELS.get(self.text(), -1)
            if level < min_level:
                break
            node = Node("BinaryOp")
            node.text = self.text()
            node.first = lhs.first
            self.next()
            rhs = self.parse_binary(level + 1)
            if rhs is None:
                self.diag(f"expected right operand of '{node.text}'")
                return lhs
            node.children = [lhs, rhs]
            node.last = self.last_orig()
            lhs = node
        return lhs

    def paren_opens_type(self):
        if self.eof() or self.text() != "(" or not self.has(1):
            return False
        t = self.text(1)
        if self.kind(1) == "Keyword":
            return (t in TYPE_KEYWORDS or t in QUALIFIERS
                    or t in ("struct", "union", "enum"))
        if self.kind(1) == "Identifier":
            return self.is_known_type(t)
        return False

    def parse_unary(self):
        if self.eof():
            return None
        start = self.pos
        t = self.text()
        if t in ("++", "--", "+", "-", "!", "~", "*", "&"):
            node = Node("UnaryOp")
            node.text = t
            self.next()
            operand = self.parse_unary()
            if operand is None:
                self.diag(f"expected operand of unary '{t}'")
                return None
            node.children.append(operand)
            self.span(node, start)
            return node
        if t == "sizeof":
            node = Node("UnaryOp")
            node.text = "sizeof"
            self.next()
            if self.paren_opens_type():
                self.consume_balanced("(", ")")
            else:
                operand = self.parse_unary()
                if operand is not None:
                    node.children.append(operand)
                else:
                    self.diag("expected operand of sizeof")
            self.span(node, start)
            return node
        if self.paren_opens_type():
            node = Node("UnaryOp")
            node.text = "cast"
            self.consume_balanced("(", ")")
            if not self.eof() and self.text() == "{":
                self.parse_initializer_into(node.children)
            else:
                operand = self.parse_unary()
                if operand is not None:
                    node.children.append(operand)
                else:
                    self.diag("expected operand of cast")
            self.span(node, start)
            return node
        return self.parse_postfix()

    def parse_postfix(self):
        start = self.pos
        base = self.parse_primary()
        if base is None:
            return None
        while not self.eof():
            t = self.text()
            if t == "(":
                call = Node("Call")
                call.children.append(base)
                self.next()
                if not self.eof() and self.text() != ")":
                    while not self.eof():
                        arg = self.parse_assignment()
                        if arg is not None:
                            call.children.append(arg)
                        else:
                            self.diag("expected call argument")
                            break
                        if not self.accept(","):
                            break
                self.expect(")", "to close call")
                self.span(call, start)
                base = call
            elif t == "[":
                idx = Node("BinaryOp")
                idx.text = "[]"
                idx.children.append(base)
                self.next()
                sub = self.parse_expression()
                if sub is not None:
                    idx.children.append(sub)
                else:
                    self.diag("expected subscript")
                self.expect("]", "to close subscript")
                self.span(idx, start)
                base = idx
            elif t in (".", "->"):
                mem = Node("BinaryOp")
                mem.text = t
                mem.children.append(base)
                self.next()
                if not self.eof() and self.kind() == "Identifier":
                    field = Node("Identifier")
                    field.text = self.text()
                    field.first = self.orig(self.pos)
                    field.last = field.first
                    self.next()
                    mem.children.append(field)
                else:
                    self.diag("expected member name")
                self.span(mem, start)
                base = mem
            elif t in ("++", "--"):
                post = Node("UnaryOp")
                post.text = t
                self.next()
                post.children.append(base)
                self.span(post, start)
                base = post
            else:
                break
        return base

    def parse_primary(self):
        if self.eof():
            return None
        start = self.pos
        k = self.kind()
        if k == "Keyword":
            return None
        if k == "Identifier":
            node = Node("Identifier")
            node.text = self.text()
            self.next()
            self.span(node, start)
            return node
        if k in ("IntLiteral", "FloatLiteral", "CharLiteral"):
            node = Node("Literal")
            node.text = self.text()
            self.next()
            self.span(node, start)
            return node
        if k == "StringLiteral":
            node = Node("Literal")
            node.text = self.text()
            self.next()
            while not self.eof() and self.kind() == "StringLiteral":
                node.text += self.text()
                self.next()
            self.span(node, start)
            return node
        if self.text() == "(":
            self.next()
            inner = self.parse_expression()
            if inner is None:
                self.diag("expected expression after '('")
                return None
            self.expect(")", "to close parenthesized expression")
            inner.first = self.orig(start)
            inner.last = self.last_orig()
            return inner
        return None

    def run(self):
        root = Node("TranslationUnit")
        if self.tokens:
            root.first = 0
            root.last = len(self.tokens) - 1
        while not self.eof():
            if self.text() == ";":
                self.next()
                continue
            before = self.pos
            item = self.parse_external()
            if item is not None:
                root.children.append(item)
            if self.pos == before:
                self.sync()
        return root


# -- metrics ---------------------------------------------------------------

def walk(node):
    yield node
    for c in node.children:
        yield from walk(c)


def file_metrics(src, tokens, root):
    chars = len(src)
    lines = 0
    if src:
        lines = src.count("\n") + (0 if src.endswith("\n") else 1)
    functions = sum(1 for c in root.children if c.kind == "FunctionDef")
    comment_chars = 0
    comment_lines = set()
    for t in tokens:
        if t.kind != "Comment":
            continue
        comment_chars += len(t.text)
        for l in range(t.line, t.line + t.text.count("\n") + 1):
            comment_lines.add(l)
    ratio = comment_chars / chars if chars else 0.0
    return {
        "chars": chars,
        "lines": lines,
        "functions": functions,
        "comment_char_ratio": ratio,
        "comment_lines": len(comment_lines),
    }


def max_nesting_depth(fn):
    best = 0

    def rec(node, depth):
        nonlocal best
        if node.kind in CONTROL_KINDS:
            depth += 1
        best = max(best, depth)
        for c in node.children:
            rec(c, depth)

    rec(fn, 0)
    return best


def function_metrics(fn, tokens):
    cc = 1 + sum(1 for n in walk(fn) if n.kind in DECISION_KINDS)
    params = next((c for c in fn.children if c.kind == "ParamList"), None)
    body = next((c for c in fn.children if c.kind == "CompoundStmt"), None)

    var_names = set()
    returns = 0
    loc_lines = set()
    if body is not None:
        for n in walk(body):
            if n.kind == "Decl":
                var_names.update(n.decl_names)
            if n.kind == "Return":
                returns += 1
        if body.first >= 0:
            for i in range(body.first, min(body.last + 1, len(tokens))):
                t = tokens[i]
                if t.kind in ("Comment", "PreprocessorLine"):
                    continue
                if t.text in ("{", "}"):
                    continue
                loc_lines.add(t.line)

    node_counts = Counter()
    bigram_counts = Counter()
    for n in walk(fn):
        node_counts[n.kind] += 1
        for c in n.children:
            bigram_counts[(n.kind, c.kind)] += 1
    total = sum(node_counts.values())

    operators = Counter()
    operands = Counter()
    if fn.first >= 0:
        for i in range(fn.first, min(fn.last + 1, len(tokens))):
            t = tokens[i]
            if t.kind in ("Identifier", "IntLiteral", "FloatLiteral",
                          "CharLiteral", "StringLiteral"):
                operands[t.text] += 1
            elif t.kind in ("Operator", "Punctuator"):
                if t.text not in HALSTEAD_EXCLUDED:
                    operators[t.text] += 1
            elif t.kind == "Keyword":
                if t.text in HALSTEAD_KEYWORD_OPS:
                    operators[t.text] += 1
    calls = sum(1 for n in walk(fn) if n.kind == "Call")
    if calls:
        operators["call"] += calls

    n1, n2 = len(operators), len(operands)
    N1, N2 = sum(operators.values()), sum(operands.values())
    volume = (N1 + N2) * math.log2(n1 + n2) if (n1 + n2) > 0 else 0.0
    difficulty = (n1 / 2.0) * (N2 / n2) if n2 > 0 else 0.0
    effort = difficulty * volume

    return {
        "name": fn.text,
        "dmax": max_nesting_depth(fn),
        "cc": cc,
        "params": len(params.children) if params is not None else 0,
        "loc": len(loc_lines),
        "vars": len(var_names),
        "returns": returns,
        "n1": n1,
        "n2": n2,
        "N1": N1,
        "N2": N2,
        "volume": volume,
        "difficulty": difficulty,
        "effort": effort,
        "node_count": total,
        "node_tf": {k: v / total for k, v in sorted(node_counts.items())},
        "bigram_tf": {f"{a}>{b}": v / total
                      for (a, b), v in sorted(bigram_counts.items())},
        "bigram_counts": {f"{a}>{b}": v
                          for (a, b), v in sorted(bigram_counts.items())},
    }


def analyze_file(path):
    with open(path, "rb") as fh:
        src = fh.read().decode("latin-1")
    tokens = tokenize(src)
    parser = Parser(tokens)
    root = parser.run()
    if parser.diags:
        raise SystemExit(f"{path}: oracle parser diagnostics: {parser.diags}")
    fns = [c for c in root.children if c.kind == "FunctionDef"]
    return {
        "file": file_metrics(src, tokens, root),
        "functions": [function_metrics(fn, tokens) for fn in fns],
    }


def main():
    if len(sys.argv) < 3:
        raise SystemExit(__doc__)
    fixture_dir = sys.argv[1]
    import os

    names = sorted(n for n in os.listdir(fixture_dir) if n.endswith(".c"))
    results = {}
    for name in names:
        results[name] = analyze_file(os.path.join(fixture_dir, name))

    if sys.argv[2] == "--vocab":
        top_n = int(sys.argv[3]) if len(sys.argv) > 3 else 50
        totals = Counter()
        for r in results.values():
            for f in r["functions"]:
                for key, c in f["bigram_counts"].items():
                    totals[key] += c
        kind_index = {k: i for i, k in enumerate(NODE_KINDS)}

        def sort_key(item):
            key, count = item
            a, b = key.split(">")
            return (-count, kind_index[a], kind_index[b])

        ranked = sorted(totals.items(), key=sort_key)[:top_n]
        print("// C++ initializer")
        for key, count in ranked:
            a, b = key.split(">")
            print(f"    {{{kind_index[a]}, {kind_index[b]}}},  // {key} ({count})")
        print(json.dumps([k for k, _ in ranked], indent=1))
        return

    for r in results.values():
        for f in r["functions"]:
            del f["bigram_counts"]
    with open(sys.argv[2], "w") as fh:
        json.dump({"fixtures": results}, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote {sys.argv[2]} ({len(results)} fixtures)")


if __name__ == "__main__":
    main()
