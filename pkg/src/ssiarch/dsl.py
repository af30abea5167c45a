"""Architecture-description DSL for DI/SSI systems.

A model declares actors (owner/issuer/verifier), wallet bindings,
implemented design patterns, NFR fulfilment claims, and explicit
dependencies:

    system "campus" {
      actor owner "alice" {
        claims: [NFR1, NFR4];
      }
      actor issuer "uni" {
        patterns: [A:"Verifiable ID"];
      }
      actor verifier "library" {}
      wallet "phone" {
        for: "alice";
      }
      depends "library" on "uni" : NFR2;
    }

Files use extension `.ssiarch`; `#` starts a comment to end-of-line.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ssiarch.findings import Finding, Severity, SourceSpan
from ssiarch.kb import (
    ACTOR_ORDER,
    ActorKind,
    DependencyRelation,
    KnowledgeBase,
    NfrKey,
    PatternSource,
    Provenance,
)

KEYWORDS = frozenset(
    {
        "system",
        "actor",
        "owner",
        "issuer",
        "verifier",
        "wallet",
        "for",
        "patterns",
        "claims",
        "depends",
        "on",
    }
)

_ACTOR_KEYWORDS = {
    "owner": ActorKind.DATA_OWNER,
    "issuer": ActorKind.ISSUER,
    "verifier": ActorKind.VERIFIER,
}


class DslSyntaxError(Exception):
    """Lexical or syntactic error in model text, with a source span."""

    def __init__(self, message: str, span: SourceSpan) -> None:
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


class TokenKind(enum.Enum):
    KEYWORD = "keyword"
    IDENT = "ident"
    STRING = "string"
    NFRKEY = "nfrkey"
    LBRACE = "{"
    RBRACE = "}"
    LBRACKET = "["
    RBRACKET = "]"
    COMMA = ","
    SEMI = ";"
    COLON = ":"
    EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan
    #: String content for STRING tokens, NFR ordinal for NFRKEY tokens.
    value: object = None


_PUNCT = {
    "{": TokenKind.LBRACE,
    "}": TokenKind.RBRACE,
    "[": TokenKind.LBRACKET,
    "]": TokenKind.RBRACKET,
    ",": TokenKind.COMMA,
    ";": TokenKind.SEMI,
    ":": TokenKind.COLON,
}


def tokenize(text: str) -> list[Token]:
    """Lex model text into tokens with spans; comments and whitespace
    are discarded. Raises DslSyntaxError on lexical errors."""
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def advance(ch: str) -> None:
        nonlocal line, col
        if ch == "\n":
            line += 1
            col = 1
        else:
            col += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(ch)
            i += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                advance(text[i])
                i += 1
            continue
        start = SourceSpan(line, col, 1)
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, start))
            advance(ch)
            i += 1
            continue
        if ch == '"':
            advance(ch)
            i += 1
            chars: list[str] = []
            closed = False
            while i < n:
                c = text[i]
                if c == "\n":
                    break
                advance(c)
                i += 1
                if c == '"':
                    closed = True
                    break
                if c == "\\" and i < n and text[i] in ('"', "\\"):
                    chars.append(text[i])
                    advance(text[i])
                    i += 1
                else:
                    chars.append(c)
            if not closed:
                raise DslSyntaxError("unterminated string literal", start)
            value = "".join(chars)
            tokens.append(
                Token(
                    TokenKind.STRING,
                    text='"' + value + '"',
                    span=SourceSpan(start.line, start.column, len(value) + 2),
                    value=value,
                )
            )
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            span = SourceSpan(line, col, len(word))
            if word.startswith("NFR") and word[3:].isdigit():
                tokens.append(Token(TokenKind.NFRKEY, word, span, value=int(word[3:])))
            elif word in KEYWORDS:
                tokens.append(Token(TokenKind.KEYWORD, word, span))
            else:
                tokens.append(Token(TokenKind.IDENT, word, span))
            for c in word:
                advance(c)
            i = j
            continue
        raise DslSyntaxError(f"unexpected character {ch!r}", start)
    tokens.append(Token(TokenKind.EOF, "", SourceSpan(line, col, 0)))
    return tokens


# --- syntax tree -------------------------------------------------------


@dataclass
class PatternRef:
    source: PatternSource
    name: str
    span: SourceSpan


@dataclass
class ClaimRef:
    ordinal: int
    span: SourceSpan


@dataclass
class ActorNode:
    kind: ActorKind
    id: str
    patterns: list[PatternRef]
    claims: list[ClaimRef]
    span: SourceSpan


@dataclass
class WalletNode:
    id: str
    owner_ref: str
    span: SourceSpan


@dataclass
class DepNode:
    depender_ref: str
    dependee_ref: str
    ordinal: int
    span: SourceSpan


@dataclass
class ModelNode:
    name: str
    actors: list[ActorNode]
    wallets: list[WalletNode]
    deps: list[DepNode]
    span: SourceSpan


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def error(self, expected: str) -> DslSyntaxError:
        tok = self.current
        found = tok.text if tok.kind is not TokenKind.EOF else "end of input"
        return DslSyntaxError(f"expected {expected}, found {found!r}", tok.span)

    def take(self) -> Token:
        tok = self.current
        self.pos += 1
        return tok

    def expect(self, kind: TokenKind, what: str) -> Token:
        if self.current.kind is not kind:
            raise self.error(what)
        return self.take()

    def expect_kw(self, word: str) -> Token:
        tok = self.current
        if tok.kind is not TokenKind.KEYWORD or tok.text != word:
            raise self.error(f"keyword {word!r}")
        return self.take()

    def at_kw(self, word: str) -> bool:
        tok = self.current
        return tok.kind is TokenKind.KEYWORD and tok.text == word

    def parse_model(self) -> ModelNode:
        start = self.expect_kw("system").span
        name = self.expect(TokenKind.STRING, "system name string")
        self.expect(TokenKind.LBRACE, "'{'")
        actors: list[ActorNode] = []
        wallets: list[WalletNode] = []
        deps: list[DepNode] = []
        while self.current.kind is not TokenKind.RBRACE:
            if self.at_kw("actor"):
                actors.append(self.parse_actor())
            elif self.at_kw("wallet"):
                wallets.append(self.parse_wallet())
            elif self.at_kw("depends"):
                deps.append(self.parse_dep())
            else:
                raise self.error("'actor', 'wallet', 'depends', or '}'")
        self.expect(TokenKind.RBRACE, "'}'")
        self.expect(TokenKind.EOF, "end of input")
        return ModelNode(str(name.value), actors, wallets, deps, start)

    def parse_actor(self) -> ActorNode:
        start = self.expect_kw("actor").span
        kind_tok = self.current
        if kind_tok.kind is not TokenKind.KEYWORD or kind_tok.text not in _ACTOR_KEYWORDS:
            raise self.error("'owner', 'issuer', or 'verifier'")
        self.take()
        ident = self.expect(TokenKind.STRING, "actor id string")
        self.expect(TokenKind.LBRACE, "'{'")
        patterns: list[PatternRef] = []
        claims: list[ClaimRef] = []
        while self.current.kind is not TokenKind.RBRACE:
            if self.at_kw("patterns"):
                self.take()
                self.expect(TokenKind.COLON, "':'")
                patterns.extend(self.parse_pattern_list())
                self.expect(TokenKind.SEMI, "';'")
            elif self.at_kw("claims"):
                self.take()
                self.expect(TokenKind.COLON, "':'")
                claims.extend(self.parse_claim_list())
                self.expect(TokenKind.SEMI, "';'")
            else:
                raise self.error("'patterns', 'claims', or '}'")
        self.expect(TokenKind.RBRACE, "'}'")
        return ActorNode(
            kind=_ACTOR_KEYWORDS[kind_tok.text],
            id=str(ident.value),
            patterns=patterns,
            claims=claims,
            span=start,
        )

    def parse_pattern_list(self) -> list[PatternRef]:
        self.expect(TokenKind.LBRACKET, "'['")
        refs = [self.parse_pattern_ref()]
        while self.current.kind is TokenKind.COMMA:
            self.take()
            refs.append(self.parse_pattern_ref())
        self.expect(TokenKind.RBRACKET, "']'")
        return refs

    def parse_pattern_ref(self) -> PatternRef:
        tok = self.current
        if tok.kind is not TokenKind.IDENT or tok.text not in ("A", "B"):
            raise self.error("pattern catalog 'A' or 'B'")
        self.take()
        self.expect(TokenKind.COLON, "':'")
        name = self.expect(TokenKind.STRING, "pattern name string")
        return PatternRef(PatternSource(tok.text), str(name.value), tok.span)

    def parse_claim_list(self) -> list[ClaimRef]:
        self.expect(TokenKind.LBRACKET, "'['")
        claims = [self.parse_claim_ref()]
        while self.current.kind is TokenKind.COMMA:
            self.take()
            claims.append(self.parse_claim_ref())
        self.expect(TokenKind.RBRACKET, "']'")
        return claims

    def parse_claim_ref(self) -> ClaimRef:
        tok = self.expect(TokenKind.NFRKEY, "NFR key")
        return ClaimRef(int(tok.value), tok.span)  # type: ignore[arg-type]

    def parse_wallet(self) -> WalletNode:
        start = self.expect_kw("wallet").span
        ident = self.expect(TokenKind.STRING, "wallet id string")
        self.expect(TokenKind.LBRACE, "'{'")
        self.expect_kw("for")
        self.expect(TokenKind.COLON, "':'")
        owner_ref = self.expect(TokenKind.STRING, "owner id string")
        self.expect(TokenKind.SEMI, "';'")
        self.expect(TokenKind.RBRACE, "'}'")
        return WalletNode(str(ident.value), str(owner_ref.value), start)

    def parse_dep(self) -> DepNode:
        start = self.expect_kw("depends").span
        depender = self.expect(TokenKind.STRING, "depender id string")
        self.expect_kw("on")
        dependee = self.expect(TokenKind.STRING, "dependee id string")
        self.expect(TokenKind.COLON, "':'")
        nfr = self.expect(TokenKind.NFRKEY, "NFR key")
        self.expect(TokenKind.SEMI, "';'")
        return DepNode(str(depender.value), str(dependee.value), int(nfr.value), start)  # type: ignore[arg-type]


def parse(tokens: list[Token]) -> ModelNode:
    """Parse a token list into a syntax tree; raises DslSyntaxError."""
    return _Parser(tokens).parse_model()


# --- resolved model ----------------------------------------------------


@dataclass(frozen=True)
class ActorDecl:
    kind: ActorKind
    id: str
    patterns: tuple[tuple[PatternSource, str], ...] = ()
    claims: tuple[NfrKey, ...] = ()
    span: SourceSpan | None = field(default=None, compare=False)


@dataclass(frozen=True)
class WalletDecl:
    id: str
    owner_ref: str
    span: SourceSpan | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SystemModel:
    """A resolved architecture description. Actors are held in canonical
    order (owner, issuer, verifier; then declaration order)."""

    name: str
    actors: tuple[ActorDecl, ...]
    wallets: tuple[WalletDecl, ...]
    explicit_deps: tuple[DependencyRelation, ...] = ()
    uses_global_system: bool = True

    def actors_of(self, kind: ActorKind) -> tuple[ActorDecl, ...]:
        return tuple(a for a in self.actors if a.kind == kind)


@dataclass
class ResolveResult:
    """Either a resolved model (possibly with warnings) or error findings.
    model is None if and only if findings contain at least one error."""

    model: SystemModel | None
    findings: list[Finding]


_KIND_ORDER = {ActorKind.DATA_OWNER: 0, ActorKind.ISSUER: 1, ActorKind.VERIFIER: 2}
_NODE_ORDER = {kind: i for i, kind in enumerate(ACTOR_ORDER)}


def resolve(tree: ModelNode, kb: KnowledgeBase) -> ResolveResult:
    """Resolve identifier references, validate claims and patterns, and
    enforce model invariants. Unknown pattern names are warnings (the
    complete pattern catalogs live in extension files)."""
    findings: list[Finding] = []

    ids: dict[str, ActorNode | WalletNode] = {}
    for node in [*tree.actors, *tree.wallets]:
        if node.id in ids:
            findings.append(
                Finding(
                    Severity.ERROR,
                    "model.duplicate-id",
                    node.id,
                    f"id {node.id!r} is declared more than once",
                    node.span,
                )
            )
        else:
            ids[node.id] = node

    for kind, keyword in (
        (ActorKind.DATA_OWNER, "owner"),
        (ActorKind.ISSUER, "issuer"),
        (ActorKind.VERIFIER, "verifier"),
    ):
        if not any(a.kind == kind for a in tree.actors):
            findings.append(
                Finding(
                    Severity.ERROR,
                    "model.missing-actor",
                    keyword,
                    f"model declares no {keyword} actor",
                    tree.span,
                )
            )

    actors: list[ActorDecl] = []
    for order, node in enumerate(tree.actors):
        claims: set[NfrKey] = set()
        for claim in node.claims:
            try:
                claims.add(NfrKey(claim.ordinal))
            except ValueError:
                findings.append(
                    Finding(
                        Severity.ERROR,
                        "model.unknown-nfr",
                        node.id,
                        f"NFR{claim.ordinal} is not a known NFR key",
                        claim.span,
                    )
                )
        patterns: set[tuple[PatternSource, str]] = set()
        for ref in node.patterns:
            patterns.add((ref.source, ref.name))
            if kb.find_pattern(ref.source, ref.name) is None:
                findings.append(
                    Finding(
                        Severity.WARNING,
                        "model.unknown-pattern",
                        node.id,
                        f"pattern {ref.name!r} is not in catalog {ref.source.value} "
                        "of the loaded knowledge base",
                        ref.span,
                    )
                )
        actors.append(
            ActorDecl(
                kind=node.kind,
                id=node.id,
                patterns=tuple(sorted(patterns, key=lambda p: (p[0].value, p[1]))),
                claims=tuple(sorted(claims)),
                span=node.span,
            )
        )
    actors.sort(key=lambda a: _KIND_ORDER[a.kind])

    wallets: list[WalletDecl] = []
    owners_with_wallet: set[str] = set()
    for node in tree.wallets:
        target = ids.get(node.owner_ref)
        if not isinstance(target, ActorNode) or target.kind != ActorKind.DATA_OWNER:
            findings.append(
                Finding(
                    Severity.ERROR,
                    "model.unresolved-ref",
                    node.id,
                    f"wallet {node.id!r} is bound to {node.owner_ref!r}, "
                    "which is not a declared data owner",
                    node.span,
                )
            )
            continue
        if node.owner_ref in owners_with_wallet:
            findings.append(
                Finding(
                    Severity.ERROR,
                    "model.duplicate-wallet",
                    node.id,
                    f"data owner {node.owner_ref!r} already has a wallet",
                    node.span,
                )
            )
            continue
        owners_with_wallet.add(node.owner_ref)
        wallets.append(WalletDecl(node.id, node.owner_ref, node.span))

    def kind_of(ref: str) -> ActorKind | None:
        target = ids.get(ref)
        if isinstance(target, ActorNode):
            return target.kind
        if isinstance(target, WalletNode):
            return ActorKind.WALLET
        return None

    deps: set[DependencyRelation] = set()
    for node in tree.deps:
        depender = kind_of(node.depender_ref)
        dependee = kind_of(node.dependee_ref)
        bad = False
        for ref, kind in ((node.depender_ref, depender), (node.dependee_ref, dependee)):
            if kind is None:
                findings.append(
                    Finding(
                        Severity.ERROR,
                        "model.unresolved-ref",
                        ref,
                        f"dependency references undeclared id {ref!r}",
                        node.span,
                    )
                )
                bad = True
        if bad:
            continue
        try:
            nfr = NfrKey(node.ordinal)
        except ValueError:
            findings.append(
                Finding(
                    Severity.ERROR,
                    "model.unknown-nfr",
                    node.depender_ref,
                    f"NFR{node.ordinal} is not a known NFR key",
                    node.span,
                )
            )
            continue
        if depender == dependee:
            findings.append(
                Finding(
                    Severity.ERROR,
                    "model.self-dependency",
                    node.depender_ref,
                    f"dependency endpoints {node.depender_ref!r} and "
                    f"{node.dependee_ref!r} resolve to the same actor kind",
                    node.span,
                )
            )
            continue
        deps.add(
            DependencyRelation(
                depender=depender,  # type: ignore[arg-type]
                dependee=dependee,  # type: ignore[arg-type]
                nfr=nfr,
                provenance=Provenance.EXTENSION,
            )
        )

    if any(f.severity is Severity.ERROR for f in findings):
        return ResolveResult(model=None, findings=findings)
    model = SystemModel(
        name=tree.name,
        actors=tuple(actors),
        wallets=tuple(wallets),
        explicit_deps=tuple(
            sorted(
                deps,
                key=lambda r: (_NODE_ORDER[r.depender], _NODE_ORDER[r.dependee], r.nfr),
            )
        ),
    )
    return ResolveResult(model=model, findings=findings)


def load_model(text: str, kb: KnowledgeBase) -> ResolveResult:
    """tokenize + parse + resolve, with lexical and syntax errors turned
    into findings. Any input yields a model or at least one finding."""
    try:
        tokens = tokenize(text)
    except DslSyntaxError as exc:
        return ResolveResult(
            model=None,
            findings=[Finding(Severity.ERROR, "syntax.lexical", "<input>", exc.message, exc.span)],
        )
    try:
        tree = parse(tokens)
    except DslSyntaxError as exc:
        return ResolveResult(
            model=None,
            findings=[Finding(Severity.ERROR, "syntax.parse", "<input>", exc.message, exc.span)],
        )
    return resolve(tree, kb)


# --- canonical formatting ----------------------------------------------


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_model(model: SystemModel) -> str:
    """Deterministic canonical DSL text; parsing it back resolves to a
    model structurally equal to the input."""
    lines = [f"system {_quote(model.name)} {{"]
    for actor in model.actors:
        keyword = {v: k for k, v in _ACTOR_KEYWORDS.items()}[actor.kind]
        header = f"  actor {keyword} {_quote(actor.id)} {{"
        if not actor.patterns and not actor.claims:
            lines.append(header + "}")
            continue
        lines.append(header)
        if actor.patterns:
            pats = ", ".join(f"{s.value}:{_quote(n)}" for s, n in actor.patterns)
            lines.append(f"    patterns: [{pats}];")
        if actor.claims:
            keys = ", ".join(k.name for k in actor.claims)
            lines.append(f"    claims: [{keys}];")
        lines.append("  }")
    for wallet in model.wallets:
        lines.append(f"  wallet {_quote(wallet.id)} {{")
        lines.append(f"    for: {_quote(wallet.owner_ref)};")
        lines.append("  }")
    for rel in model.explicit_deps:
        depender = _representative_id(model, rel.depender)
        dependee = _representative_id(model, rel.dependee)
        lines.append(f"  depends {_quote(depender)} on {_quote(dependee)} : {rel.nfr.name};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _representative_id(model: SystemModel, kind: ActorKind) -> str:
    if kind == ActorKind.WALLET:
        if not model.wallets:
            raise ValueError("model has no wallet to represent")
        return model.wallets[0].id
    for actor in model.actors:
        if actor.kind == kind:
            return actor.id
    raise ValueError(f"model has no {kind.long_name} actor to represent")
