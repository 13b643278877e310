"""Búsqueda aproximada de firmas dentro del cuerpo de una función."""

from dataclasses import dataclass

from codesig.signatures import normalized_levenshtein


@dataclass(frozen=True)
class TokenStream:
    """Tokens de firma del cuerpo con la línea de origen de cada uno."""

    tokens: tuple = ()
    lines: tuple = ()

    @classmethod
    def from_body(cls, body, normalizer):
        tokens, lines = [], []
        for number, text in body:
            for token in normalizer.signature(text):
                tokens.append(token)
                lines.append(number)
        return cls(tuple(tokens), tuple(lines))

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class MatchResult:
    score: float = 0.0
    span: tuple = None

    def matches(self, threshold):
        return self.score >= threshold


def match_signature(stream, signature):
    """Mejor ventana de |firma| tokens: puntuación 1 − NL, el empate se queda con la primera."""
    signature = tuple(signature)
    if not signature or not stream.tokens:
        return MatchResult()
    width = min(len(signature), len(stream))
    best = MatchResult(score=-1.0)
    for start in range(len(stream) - width + 1):
        window = stream.tokens[start:start + width]
        score = 1.0 - normalized_levenshtein(window, signature)
        if score > best.score:
            best = MatchResult(score, (stream.lines[start], stream.lines[start + width - 1]))
            if score == 1.0:
                break
    return best


def match_body(body, signature, normalizer):
    """Atajo para comparar una firma con líneas (número, texto) de un cuerpo."""
    return match_signature(TokenStream.from_body(body, normalizer), signature)
