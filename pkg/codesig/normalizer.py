"""Normalizador léxico: una línea de código a su firma abstracta."""

import logging
import re
from dataclasses import dataclass

logger = logging.getLogger(__name__)

TOKEN_RE = re.compile(r'''
    (?P<string>"(?:\\.|[^"\\])*"?|'(?:\\.|[^'\\])*'?|`[^`]*`?)
  | (?P<number>(?:0[xX][0-9a-fA-F]+|\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)[uUlLfF]*)
  | (?P<ident>[A-Za-z_]\w*)
  | (?P<op><<=|>>=|\|\||&&|==|!=|<=|>=|:=|->|::|\+\+|--|<<|>>|[-+*/%&|^]=|\.\.\.|[-+*/%=<>!&|^~?:;,.])
  | (?P<open>[(\[{])
  | (?P<close>[)\]}])
''', re.VERBOSE)

CONTROL_KEYWORDS = {'if', 'for', 'while', 'return', 'throw', 'defer'}
CONDITION_KEYWORDS = {'if', 'for', 'while'}
SKIP_WORDS = {
    'else', 'break', 'continue', 'case', 'default', 'goto', 'do', 'try', 'finally',
    'switch', 'select', 'pass', 'public', 'private', 'protected', 'catch', 'except',
}
NON_CALL_WORDS = CONTROL_KEYWORDS | SKIP_WORDS | {'func', 'def', 'elif', 'not', 'and', 'or', 'in'}
LOGICAL_OPERATORS = {'||': '||', '&&': '&&', 'or': '||', 'and': '&&'}
ASSIGNMENT_OPERATORS = {
    '=', ':=', '+=', '-=', '*=', '/=', '%=', '&=', '|=', '^=', '<<=', '>>=', '++', '--',
}
OPERAND_SEPARATORS = ASSIGNMENT_OPERATORS | {
    '==', '!=', '<', '>', '<=', '>=', '+', '-', '*', '/', '%', '&', '|', '^',
    '<<', '>>', ',', '?', ':', '!', '~', 'not', 'range', 'in', 'is',
}
DECLARATOR_TOKENS = {'*', '&', '&&', '>', ']'}

RANKS = {'ERR': 6, 'LEN': 5, 'SIZE': 5, 'NIL': 4, 'BOL': 3, 'TXT': 2, 'NUM': 1}
FUNCTION_RANK = 7

PAIR_SEPARATOR = '==>'


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    depth: int = 0


def tokenize(text):
    """Tokens léxicos de la línea; los literales de texto quedan como un solo token."""
    return [Token(match.lastgroup, match.group()) for match in TOKEN_RE.finditer(text)]


def _with_depth(tokens):
    depth = 0
    result = []
    for token in tokens:
        if token.kind == 'close':
            depth = max(depth - 1, 0)
            result.append(Token(token.kind, token.text, depth))
        elif token.kind == 'open':
            result.append(Token(token.kind, token.text, depth))
            depth += 1
        else:
            result.append(Token(token.kind, token.text, depth))
    return result


def _trim(tokens):
    start, end = 0, len(tokens)
    while start < end and tokens[start].text in ('}', ';'):
        start += 1
    unmatched = sum(t.text == '}' for t in tokens[start:end]) - sum(t.text == '{' for t in tokens[start:end])
    while end > start:
        text = tokens[end - 1].text
        if text in ('{', ';', ':'):
            end -= 1
        elif text == '}' and unmatched > 0:
            unmatched -= 1
            end -= 1
        else:
            break
    return tokens[start:end]


def _base(tokens):
    return min(token.depth for token in tokens) if tokens else 0


def _matching(tokens, index):
    """Índice del cierre que corresponde a la apertura en index."""
    depth = tokens[index].depth
    for position in range(index + 1, len(tokens)):
        if tokens[position].kind == 'close' and tokens[position].depth == depth:
            return position
    return None


def _split(tokens, separators):
    """Partir en el nivel base; devuelve pares (separador previo, segmento)."""
    base = _base(tokens)
    parts, current, previous = [], [], None
    for token in tokens:
        if token.depth == base and token.kind in ('op', 'ident') and token.text in separators:
            parts.append((previous, current))
            current, previous = [], token.text
        else:
            current.append(token)
    parts.append((previous, current))
    return parts


def _is_call(tokens, index):
    token = tokens[index]
    return (
        token.kind == 'ident'
        and token.text not in NON_CALL_WORDS
        and index + 1 < len(tokens)
        and tokens[index + 1].text == '('
    )


def _last_call(tokens):
    calls = [(tokens[index].depth, index) for index in range(len(tokens)) if _is_call(tokens, index)]
    if not calls:
        return None
    shallowest = min(depth for depth, _ in calls)
    index = max(index for depth, index in calls if depth == shallowest)
    return tokens[index].text


def _call_token(name, language):
    if name in language.size_functions:
        return language.size_functions[name]
    if name in language.error_functions:
        return 'ERR'
    return f"{name}()"


def _rank(atom):
    return FUNCTION_RANK if atom.endswith('()') else RANKS[atom]


class LineNormalizer:
    """Traduce líneas de código limpias a firmas según la sintaxis de un lenguaje."""

    def __init__(self, language, keep_numeric_atoms=False):
        self.language = language
        self.keep_numeric_atoms = keep_numeric_atoms

    def signature(self, text):
        tokens = _with_depth(_trim(tokenize(text)))
        return tuple(self._statement(tokens))

    # ===== Sentencias =====

    def _statement(self, tokens):
        while tokens and tokens[0].text == 'else':
            tokens = tokens[1:]
        if not tokens:
            return []
        tokens = _with_depth(tokens)
        head = tokens[0].text
        if tokens[0].kind == 'ident' and head in CONTROL_KEYWORDS:
            return self._control(head, tokens[1:])
        if head in ('case', 'default'):
            return self._after_label(tokens)
        if head in SKIP_WORDS:
            return []

        call = _last_call(tokens)
        if call is not None:
            return [_call_token(call, self.language)]
        variable = self._variable(tokens)
        if variable:
            return [variable]
        logger.debug("Línea sin firma: %s", ' '.join(token.text for token in tokens))
        return []

    def _after_label(self, tokens):
        for index, token in enumerate(tokens):
            if token.depth == 0 and token.text == ':':
                return self._statement(tokens[index + 1:])
        return []

    def _control(self, keyword, rest):
        if keyword not in CONDITION_KEYWORDS:
            return [keyword, *self._condition(rest)]
        tail = []
        if self.language.condition_parens and rest and rest[0].text == '(':
            close = _matching(rest, 0)
            if close is None:
                condition = rest[1:]
            else:
                condition, tail = rest[1:close], rest[close + 1:]
        else:
            condition = rest
        signature = [keyword, *self._condition(condition)]
        tail = _trim(tail)
        if len(tail) >= 2 and tail[0].text == '{' and tail[-1].text == '}':
            tail = _trim(tail[1:-1])
        if tail:
            signature.extend(self._statement(tail))
        return signature

    def _condition(self, tokens):
        """Una abstracción por átomo lógico, conservando || y && entre átomos emitidos."""
        signature = []
        for _, segment in _split(tokens, {';'}):
            pending = None
            emitted = False
            for operator, atom in _split(segment, set(LOGICAL_OPERATORS)):
                if operator is not None:
                    pending = LOGICAL_OPERATORS[operator]
                value = self._value(atom)
                if value is None:
                    continue
                if emitted and pending:
                    signature.append(pending)
                signature.append(value)
                emitted, pending = True, None
        return signature

    # ===== Operandos =====

    def _value(self, tokens):
        """Abstracción más específica entre los operandos de una expresión."""
        best = None
        for _, operand in _split(tokens, OPERAND_SEPARATORS | set(LOGICAL_OPERATORS)):
            value = self._operand(operand)
            if value is not None and (best is None or _rank(value) > _rank(best)):
                best = value
        if best == 'NUM' and not self.keep_numeric_atoms:
            logger.debug("Átomo numérico descartado")
            return None
        return best

    def _operand(self, tokens):
        if not tokens:
            return None
        if tokens[0].text == '(' and _matching(tokens, 0) == len(tokens) - 1:
            return self._value(tokens[1:-1])
        call = _last_call(tokens)
        if call is not None:
            return _call_token(call, self.language)
        if all(token.kind == 'string' for token in tokens):
            return 'TXT'
        if len(tokens) == 1:
            token = tokens[0]
            if token.kind == 'number':
                return 'NUM'
            if token.text in self.language.nil_literals:
                return 'NIL'
            if token.text in self.language.bool_literals:
                return 'BOL'
        return None

    # ===== Asignaciones y declaraciones =====

    def _variable(self, tokens):
        base = _base(tokens)
        assignment = next(
            (
                index for index, token in enumerate(tokens)
                if token.depth == base and token.kind == 'op' and token.text in ASSIGNMENT_OPERATORS
            ),
            None,
        )
        if assignment is not None:
            target = tokens[:assignment] or tokens[assignment + 1:]
        elif self._is_declaration(tokens, base):
            target = tokens
        else:
            return None
        return 'VAR' + '[]' * self._bracket_groups(target, base)

    @staticmethod
    def _is_declaration(tokens, base):
        core = list(tokens)
        while core and core[-1].depth == base and core[-1].text == ']':
            openings = [index for index, token in enumerate(core) if token.text == '[' and token.depth == base]
            if not openings:
                return False
            core = core[:openings[-1]]
        if len(core) < 2 or core[-1].kind != 'ident':
            return False
        previous = core[-2]
        return previous.kind == 'ident' or previous.text in DECLARATOR_TOKENS

    @staticmethod
    def _bracket_groups(target, base):
        last_name = max(
            (index for index, token in enumerate(target) if token.depth == base and token.kind == 'ident'),
            default=-1,
        )
        return sum(
            1 for token in target[last_name + 1:]
            if token.depth == base and token.text == '['
        )


def line_signature(text, language, keep_numeric_atoms=False):
    """Firma de una línea limpia; vacía si la línea no es clasificable."""
    return LineNormalizer(language, keep_numeric_atoms).signature(text)
