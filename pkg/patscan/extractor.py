"""Extracción de funciones de archivos C/C++ y Go por profundidad de llaves."""

import logging
import re
from dataclasses import dataclass

from codesig.cleaning import strip_comments

from .exceptions import UnbalancedBracesError

logger = logging.getLogger(__name__)

GO_LANGUAGE = 'go'
SUPPORTED_LANGUAGES = {'c-family', GO_LANGUAGE}

GO_FUNC_RE = re.compile(
    r'^\s*func\s*'
    r'(?:\(\s*(?:\w+\s+)?\*?\s*(?P<receiver>\w+)(?:\[[^\]]*\])?\s*\)\s*)?'
    r'(?P<name>\w+)\s*(?:\[[^\]]*\]\s*)?\('
)
GO_FUNC_START_RE = re.compile(r'(?m)^[ \t]*func\b')
C_NAME_RE = re.compile(r'(?P<name>(?:[A-Za-z_]\w*\s*::\s*)*~?[A-Za-z_]\w*)\s*$')
C_REJECTED_WORDS = {
    'if', 'for', 'while', 'switch', 'catch', 'return', 'sizeof', 'do', 'else',
    'class', 'struct', 'namespace', 'enum', 'union', 'extern', 'typedef',
}


@dataclass(frozen=True)
class SourceFunction:
    name: str
    start_line: int
    end_line: int
    body: tuple = ()

    @property
    def span(self):
        return self.start_line, self.end_line


def _mask_strings(text, quotes):
    """Reemplazar el contenido de los literales por espacios."""
    out = []
    quote = None
    index = 0
    while index < len(text):
        char = text[index]
        if quote:
            if char == '\\' and quote != '`' and index + 1 < len(text):
                out.append('  ')
                index += 2
                continue
            if char == quote:
                quote = None
                out.append(char)
            else:
                out.append(' ')
        else:
            if char in quotes:
                quote = char
            out.append(char)
        index += 1
    return ''.join(out)


def _go_name(header):
    match = GO_FUNC_RE.match(header)
    if not match:
        return None
    receiver = match.group('receiver')
    return f"{receiver}.{match.group('name')}" if receiver else match.group('name')


def _c_name(header):
    depth = 0
    for index, char in enumerate(header):
        if char in '([':
            if char == '(' and depth == 0:
                prefix = header[:index]
                break
            depth += 1
        elif char in ')]':
            depth = max(depth - 1, 0)
    else:
        return None
    if '=' in prefix:
        return None
    words = re.findall(r'[A-Za-z_]\w*', prefix)
    if not words or words[0] in C_REJECTED_WORDS or words[-1] in C_REJECTED_WORDS:
        return None
    match = C_NAME_RE.search(prefix)
    if not match:
        return None
    return re.sub(r'\s+', '', match.group('name'))


def function_name(header, language):
    """Nombre calificado de la función que abre esta cabecera, o None."""
    if language.name == GO_LANGUAGE:
        starts = list(GO_FUNC_START_RE.finditer(header))
        if not starts:
            return None
        return _go_name(' '.join(header[starts[-1].start():].split()))
    header = ' '.join(header.split())
    return _c_name(header) if header else None


def extract_functions(text, language):
    """Funciones de primer nivel con su cuerpo (líneas sin comentarios).

    Los bloques de clases, namespaces y structs son transparentes; las
    funciones anidadas forman parte del cuerpo de la que las contiene.
    """
    lines = strip_comments(text.splitlines(), language)
    quotes = set(language.string_quotes)
    functions = []
    stack = []
    header = []
    for number, line in enumerate(lines, start=1):
        if language.name != GO_LANGUAGE and line.startswith('#'):
            header = []
            continue
        masked = _mask_strings(line, quotes)
        segment_start = 0
        for index, char in enumerate(masked):
            if char == '{':
                if any(kind == 'function' for kind, _, _ in stack):
                    stack.append(('block', None, number))
                else:
                    name = function_name(''.join(header) + masked[segment_start:index], language)
                    stack.append(('function' if name else 'container', name, number))
                header = []
                segment_start = index + 1
            elif char == '}':
                if not stack:
                    raise UnbalancedBracesError(number)
                kind, name, start = stack.pop()
                if kind == 'function':
                    body = tuple(
                        (line_number, lines[line_number - 1])
                        for line_number in range(start + 1, number)
                    )
                    functions.append(SourceFunction(name, start, number, body))
                header = []
                segment_start = index + 1
            elif char == ';':
                header = []
                segment_start = index + 1
        header.append(masked[segment_start:] + '\n')
    if stack:
        raise UnbalancedBracesError(len(lines))
    functions.sort(key=lambda function: function.start_line)
    logger.debug("%d funciones extraídas", len(functions))
    return functions
