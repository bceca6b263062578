"""Phonetic name encoders: Soundex, Metaphone, Double Metaphone, NYSIIS, MRA.

All encoders operate on the A-Z letters of a name; anything else (hyphens,
apostrophes, digits, accented characters) is stripped first, and encoding is
case-insensitive. Each function accepts a ``Name`` or a plain string.

Variant notes, for anyone diffing against other libraries:

* ``soundex`` is American Soundex: vowels and Y act as code separators,
  H and W are dropped entirely (so consonants with equal codes collapse
  across them), and a tail code equal to the first letter's code is
  removed before padding. Output always matches ``[A-Z][0-9]{3}``.
* ``metaphone`` is the 1990 algorithm in its sequential rewrite-rule
  formulation (the one used by the talisman reference library); codes are
  uppercase and unbounded in length.
* ``double_metaphone`` follows the published 2000 rule set with the default
  four-character truncation. The secondary code equals the primary whenever
  no ambiguity rule fires.
* ``nysiis`` is the original (not refined) algorithm as a per-letter scan.
  An H survives only between two vowels; otherwise it dissolves into the
  preceding letter, which the adjacent-duplicate rule then swallows.
* ``mra`` is the Match Rating Approach encoding component: delete
  non-leading vowels, collapse runs of repeated letters, and keep the
  first three plus last three characters when longer than six.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from itertools import groupby

from .corpus import Name
from .errors import NoEncodableContentError


class PhoneticAlgorithm(Enum):
    SOUNDEX = "soundex"
    METAPHONE = "metaphone"
    DOUBLE_METAPHONE = "dmetaphone"
    NYSIIS = "nysiis"
    MRA = "mra"


@dataclass(frozen=True)
class PhoneticCode:
    """One encoder's output. ``secondary`` is present exactly for
    Double Metaphone (equal to ``primary`` for unambiguous inputs)."""

    algorithm: PhoneticAlgorithm
    primary: str
    secondary: str | None = None

    def codes(self) -> tuple[str, ...]:
        if self.secondary is None:
            return (self.primary,)
        return (self.primary, self.secondary)

    def matches(self, other: "PhoneticCode") -> bool:
        """True when any code of self equals any code of other."""
        return bool(set(self.codes()) & set(other.codes()))


def _letters(name: Name | str) -> str:
    text = name.normalized if isinstance(name, Name) else name
    letters = "".join(c for c in text.upper() if "A" <= c <= "Z")
    if not letters:
        raise NoEncodableContentError(f"no A-Z letters in {text!r}")
    return letters


def _squeeze(text: str) -> str:
    return "".join(c for c, _ in groupby(text))


def encode(name: Name | str, algorithm: PhoneticAlgorithm) -> PhoneticCode:
    """Dispatch to the encoder for ``algorithm``."""
    return _ENCODERS[algorithm](name)


# --- Soundex ----------------------------------------------------------------

# Vowels and Y map to the separator marker '0'; H and W map to '' and vanish
# before the collapse pass, which is what lets equal codes merge across them.
_SOUNDEX_CODES = {
    **{c: "0" for c in "AEIOUY"},
    **{c: "" for c in "HW"},
    **{c: "1" for c in "BFPV"},
    **{c: "2" for c in "CGJKQSXZ"},
    **{c: "3" for c in "DT"},
    "L": "4", "M": "5", "N": "5", "R": "6",
}


def soundex(name: Name | str) -> PhoneticCode:
    """American Soundex: first letter plus three digits."""
    letters = _letters(name)
    first = letters[0]
    tail = "".join(_SOUNDEX_CODES[c] for c in letters[1:])
    if tail and tail[0] == _SOUNDEX_CODES[first]:
        tail = tail[1:]
    digits = _squeeze(tail).replace("0", "")
    return PhoneticCode(PhoneticAlgorithm.SOUNDEX, (first + digits + "000")[:4])


# --- Metaphone --------------------------------------------------------------

# Sequential rewrite rules over a lowercase working string. Replacements are
# uppercase and therefore inert to later (lowercase) patterns, which is what
# makes a flat rule list equivalent to the original positional scan.
_METAPHONE_RULES: tuple[tuple[re.Pattern[str], str], ...] = tuple(
    (re.compile(p), r) for p, r in [
        (r"([bcdfhjklmnpqrstvwxyz])\1+", r"\1"),
        (r"^ae", "E"),
        (r"^[gkp]n", "N"),
        (r"^wr", "R"),
        (r"^x", "S"),
        (r"^wh", "W"),
        (r"mb$", "M"),
        (r"(?!^)sch", "SK"),
        (r"th", "0"),
        (r"t?ch|sh", "X"),
        (r"c(?=ia)", "X"),
        (r"[st](?=i[ao])", "X"),
        (r"s?c(?=[iey])", "S"),
        (r"[cq]", "K"),
        (r"dg(?=[iey])", "J"),
        (r"d", "T"),
        (r"g(?=h[^aeiou])", ""),
        (r"gn(ed)?", "N"),
        (r"([^g]|^)g(?=[iey])", r"\1J"),
        (r"g+", "K"),
        (r"ph", "F"),
        (r"([aeiou])h(?=\b|[^aeiou])", r"\1"),
        (r"[wy](?![aeiou])", ""),
        (r"z", "S"),
        (r"v", "F"),
        (r"(?!^)[aeiou]+", ""),
    ]
)


def metaphone(name: Name | str) -> PhoneticCode:
    """Metaphone (1990) code, uppercase, no fixed length."""
    code = _letters(name).lower()
    for pattern, replacement in _METAPHONE_RULES:
        code = pattern.sub(replacement, code)
    code = code.upper()
    if not code:
        # degenerate all-w/y inputs reduce to nothing; keep the first letter
        code = _letters(name)[0]
    return PhoneticCode(PhoneticAlgorithm.METAPHONE, code)


# --- NYSIIS -----------------------------------------------------------------

_NYSIIS_VOWELS = frozenset("AEIOU")
_NYSIIS_SINGLE = {"Q": "G", "Z": "S", "M": "N", "K": "C"}


def nysiis(name: Name | str) -> PhoneticCode:
    """Original NYSIIS code: letters only, vowels collapsed to A."""
    s = _letters(name)
    if s.startswith("MAC"):
        s = "MCC" + s[3:]
    elif s.startswith("KN"):
        s = s[1:]
    elif s.startswith("K"):
        s = "C" + s[1:]
    elif s.startswith(("PH", "PF")):
        s = "FF" + s[2:]
    elif s.startswith("SCH"):
        s = "SSS" + s[3:]
    if s.endswith(("EE", "IE")):
        s = s[:-2] + "Y"
    elif s.endswith(("DT", "RT", "RD", "NT", "ND")):
        s = s[:-2] + "D"

    key = [s[0]]
    i = 1
    while i < len(s):
        ch = s[i]
        step = 1
        if s[i:i + 2] == "EV":
            trans, step = "AF", 2
        elif ch in _NYSIIS_VOWELS:
            trans = "A"
        elif s[i:i + 3] == "SCH":
            trans, step = "SSS", 3
        elif s[i:i + 2] == "PH":
            trans, step = "FF", 2
        elif s[i:i + 2] == "KN":
            trans, step = "N", 2
        elif ch in _NYSIIS_SINGLE:
            trans = _NYSIIS_SINGLE[ch]
        elif ch == "H":
            prev = s[i - 1]
            nxt = s[i + 1] if i + 1 < len(s) else ""
            if prev in _NYSIIS_VOWELS and nxt in _NYSIIS_VOWELS:
                trans = "H"
            else:
                # H dissolves into the preceding letter, which the duplicate
                # rule below then swallows
                trans = key[-1]
        elif ch == "W" and s[i - 1] in _NYSIIS_VOWELS:
            trans = "A"
        else:
            trans = ch
        for c in trans:
            if c != key[-1]:
                key.append(c)
        i += step

    code = "".join(key)
    if len(code) > 1 and code.endswith("S"):
        code = code[:-1]
    if code.endswith("AY"):
        code = code[:-2] + "Y"
    if len(code) > 1 and code.endswith("A"):
        code = code[:-1]
    return PhoneticCode(PhoneticAlgorithm.NYSIIS, code)


# --- MRA --------------------------------------------------------------------

def mra(name: Name | str) -> PhoneticCode:
    """Match Rating Approach codex."""
    letters = _letters(name)
    codex = letters[0] + re.sub(r"[AEIOU]", "", letters[1:])
    codex = _squeeze(codex)
    if len(codex) > 6:
        codex = codex[:3] + codex[-3:]
    return PhoneticCode(PhoneticAlgorithm.MRA, codex)


# --- Double Metaphone -------------------------------------------------------

_DM_VOWELS = frozenset("AEIOUY")
_DM_CODE_LENGTH = 4


def _is_slavo_germanic(s: str) -> bool:
    return any(t in s for t in ("W", "K", "CZ", "WITZ"))


def double_metaphone(name: Name | str) -> PhoneticCode:
    """Double Metaphone (2000): a (primary, secondary) code pair."""
    word = _letters(name)
    primary, secondary = _double_metaphone_codes(word)
    primary = primary[:_DM_CODE_LENGTH]
    secondary = secondary[:_DM_CODE_LENGTH]
    if not primary and not secondary:
        primary = secondary = word[0]
    elif not primary:
        primary = secondary
    elif not secondary:
        secondary = primary
    return PhoneticCode(PhoneticAlgorithm.DOUBLE_METAPHONE, primary, secondary)


def _double_metaphone_codes(word: str) -> tuple[str, str]:
    # Pad so context windows never wrap: two leading dashes mean positions
    # before the word read as non-letters, five trailing spaces do the same
    # past the end. `first`/`last` index the real first and last letters.
    first = 2
    st = "--" + word + "     "
    last = first + len(word) - 1
    slavo = _is_slavo_germanic(word)
    vowels = _DM_VOWELS

    pri: list[str] = []
    sec: list[str] = []

    def add(p: str | None, s: str | None) -> None:
        if p:
            pri.append(p)
        if s:
            sec.append(s)

    pos = first
    if st[first:first + 2] in ("GN", "KN", "PN", "WR", "PS"):
        pos += 1
    if st[first] == "X":
        add("S", "S")
        pos += 1

    while pos <= last:
        ch = st[pos]

        if ch in vowels:
            if pos == first:
                add("A", "A")
            pos += 1

        elif ch == "B":
            add("P", "P")
            pos += 2 if st[pos + 1] == "B" else 1

        elif ch == "C":
            if (pos > first + 1 and st[pos - 2] not in vowels
                    and st[pos - 1:pos + 2] == "ACH"
                    and (st[pos + 2] not in ("I", "E")
                         or st[pos - 2:pos + 4] in ("BACHER", "MACHER"))):
                add("K", "K")
                pos += 2
            elif pos == first and st[first:first + 6] == "CAESAR":
                add("S", "S")
                pos += 2
            elif st[pos:pos + 4] == "CHIA":
                add("K", "K")
                pos += 2
            elif st[pos:pos + 2] == "CH":
                if pos > first and st[pos:pos + 4] == "CHAE":
                    add("K", "X")
                elif (pos == first
                      and (st[pos + 1:pos + 6] in ("HARAC", "HARIS")
                           or st[pos + 1:pos + 4] in ("HOR", "HYM", "HIA", "HEM"))
                      and st[first:first + 5] != "CHORE"):
                    add("K", "K")
                elif (st[first:first + 4] in ("VAN ", "VON ")
                      or st[first:first + 3] == "SCH"
                      or st[pos - 2:pos + 4] in ("ORCHES", "ARCHIT", "ORCHID")
                      or st[pos + 2] in ("T", "S")
                      or ((st[pos - 1] in ("A", "O", "U", "E") or pos == first)
                          and st[pos + 2] in ("L", "R", "N", "M", "B", "H", "F", "V", "W", " "))):
                    add("K", "K")
                elif pos > first:
                    if st[first:first + 2] == "MC":
                        add("K", "K")
                    else:
                        add("X", "K")
                else:
                    add("X", "X")
                pos += 2
            elif st[pos:pos + 2] == "CZ" and st[pos - 2:pos + 2] != "WICZ":
                add("S", "X")
                pos += 2
            elif st[pos + 1:pos + 4] == "CIA":
                add("X", "X")
                pos += 3
            elif st[pos:pos + 2] == "CC" and not (pos == first + 1 and st[first] == "M"):
                if st[pos + 2] in ("I", "E", "H") and st[pos + 2:pos + 4] != "HU":
                    if ((pos == first + 1 and st[first] == "A")
                            or st[pos - 1:pos + 4] in ("UCCEE", "UCCES")):
                        add("KS", "KS")
                    else:
                        add("X", "X")
                    pos += 3
                else:
                    add("K", "K")
                    pos += 2
            elif st[pos:pos + 2] in ("CK", "CG", "CQ"):
                add("K", "K")
                pos += 2
            elif st[pos:pos + 2] in ("CI", "CE", "CY"):
                if st[pos:pos + 3] in ("CIO", "CIE", "CIA"):
                    add("S", "X")
                else:
                    add("S", "S")
                pos += 2
            else:
                if st[pos + 1:pos + 3] in (" C", " Q", " G"):
                    add("K", "K")
                    pos += 3
                elif (st[pos + 1] in ("C", "K", "Q")
                      and st[pos + 1:pos + 3] not in ("CE", "CI")):
                    add("K", "K")
                    pos += 2
                else:
                    add("K", "K")
                    pos += 1

        elif ch == "D":
            if st[pos:pos + 2] == "DG":
                if st[pos + 2] in ("I", "E", "Y"):
                    add("J", "J")
                    pos += 3
                else:
                    add("TK", "TK")
                    pos += 2
            elif st[pos:pos + 2] in ("DT", "DD"):
                add("T", "T")
                pos += 2
            else:
                add("T", "T")
                pos += 1

        elif ch == "F":
            add("F", "F")
            pos += 2 if st[pos + 1] == "F" else 1

        elif ch == "G":
            if st[pos + 1] == "H":
                if pos > first and st[pos - 1] not in vowels:
                    add("K", "K")
                elif pos == first:
                    if st[pos + 2] == "I":
                        add("J", "J")
                    else:
                        add("K", "K")
                elif ((pos > first + 1 and st[pos - 2] in ("B", "H", "D"))
                      or (pos > first + 2 and st[pos - 3] in ("B", "H", "D"))
                      or (pos > first + 3 and st[pos - 4] in ("B", "H"))):
                    pass
                elif (pos > first + 2 and st[pos - 1] == "U"
                      and st[pos - 3] in ("C", "G", "L", "R", "T")):
                    add("F", "F")
                elif pos > first and st[pos - 1] != "I":
                    add("K", "K")
                pos += 2
            elif st[pos + 1] == "N":
                if pos == first + 1 and st[first] in vowels and not slavo:
                    add("KN", "N")
                elif (st[pos + 2:pos + 4] != "EY" and st[pos + 1] != "Y"
                      and not slavo):
                    add("N", "KN")
                else:
                    add("KN", "KN")
                pos += 2
            elif st[pos + 1:pos + 3] == "LI" and not slavo:
                add("KL", "L")
                pos += 2
            elif (pos == first
                  and (st[pos + 1] == "Y"
                       or st[pos + 1:pos + 3] in ("ES", "EP", "EB", "EL", "EY",
                                                  "IB", "IL", "IN", "IE", "EI", "ER"))):
                add("K", "J")
                pos += 2
            elif ((st[pos + 1:pos + 3] == "ER" or st[pos + 1] == "Y")
                  and st[first:first + 6] not in ("DANGER", "RANGER", "MANGER")
                  and st[pos - 1] not in ("E", "I")
                  and st[pos - 1:pos + 2] not in ("RGY", "OGY")):
                add("K", "J")
                pos += 2
            elif (st[pos + 1] in ("E", "I", "Y")
                  or st[pos - 1:pos + 3] in ("AGGI", "OGGI")):
                if (st[first:first + 4] in ("VON ", "VAN ")
                        or st[first:first + 3] == "SCH"
                        or st[pos + 1:pos + 3] == "ET"):
                    add("K", "K")
                elif st[pos + 1:pos + 5] == "IER ":
                    add("J", "J")
                else:
                    add("J", "K")
                pos += 2
            elif st[pos + 1] == "G":
                add("K", "K")
                pos += 2
            else:
                add("K", "K")
                pos += 1

        elif ch == "H":
            if (pos == first or st[pos - 1] in vowels) and st[pos + 1] in vowels:
                add("H", "H")
                pos += 2
            else:
                pos += 1

        elif ch == "J":
            if st[pos:pos + 4] == "JOSE" or st[first:first + 4] == "SAN ":
                if ((pos == first and st[pos + 4] == " ")
                        or st[first:first + 4] == "SAN "):
                    add("H", "H")
                else:
                    add("J", "H")
            elif pos == first:
                add("J", "A")
            elif (st[pos - 1] in vowels and not slavo
                  and st[pos + 1] in ("A", "O")):
                add("J", "H")
            elif pos == last:
                add("J", None)
            elif (st[pos + 1] not in ("L", "T", "K", "S", "N", "M", "B", "Z")
                  and st[pos - 1] not in ("S", "K", "L")):
                add("J", "J")
            pos += 2 if st[pos + 1] == "J" else 1

        elif ch == "K":
            add("K", "K")
            pos += 2 if st[pos + 1] == "K" else 1

        elif ch == "L":
            if st[pos + 1] == "L":
                if ((pos == last - 2
                     and st[pos - 1:pos + 3] in ("ILLO", "ILLA", "ALLE"))
                        or ((st[last - 1:last + 1] in ("AS", "OS")
                             or st[last] in ("A", "O"))
                            and st[pos - 1:pos + 3] == "ALLE")):
                    add("L", None)
                else:
                    add("L", "L")
                pos += 2
            else:
                add("L", "L")
                pos += 1

        elif ch == "M":
            add("M", "M")
            if ((st[pos - 1:pos + 2] == "UMB"
                 and (pos + 1 == last or st[pos + 2:pos + 4] == "ER"))
                    or st[pos + 1] == "M"):
                pos += 2
            else:
                pos += 1

        elif ch == "N":
            add("N", "N")
            pos += 2 if st[pos + 1] == "N" else 1

        elif ch == "P":
            if st[pos + 1] == "H":
                add("F", "F")
                pos += 2
            elif st[pos + 1] in ("P", "B"):
                add("P", "P")
                pos += 2
            else:
                add("P", "P")
                pos += 1

        elif ch == "Q":
            add("K", "K")
            pos += 2 if st[pos + 1] == "Q" else 1

        elif ch == "R":
            if (pos == last and not slavo
                    and st[pos - 2:pos] == "IE"
                    and st[pos - 4:pos - 2] not in ("ME", "MA")):
                add(None, "R")
            else:
                add("R", "R")
            pos += 2 if st[pos + 1] == "R" else 1

        elif ch == "S":
            if st[pos - 1:pos + 2] in ("ISL", "YSL"):
                pos += 1
            elif pos == first and st[first:first + 5] == "SUGAR":
                add("X", "S")
                pos += 1
            elif st[pos:pos + 2] == "SH":
                if st[pos + 1:pos + 5] in ("HEIM", "HOEK", "HOLM", "HOLZ"):
                    add("S", "S")
                else:
                    add("X", "X")
                pos += 2
            elif st[pos:pos + 3] in ("SIO", "SIA") or st[pos:pos + 4] == "SIAN":
                if not slavo:
                    add("S", "X")
                else:
                    add("S", "S")
                pos += 3
            elif ((pos == first and st[pos + 1] in ("M", "N", "L", "W"))
                  or st[pos + 1] == "Z"):
                add("S", "X")
                pos += 2 if st[pos + 1] == "Z" else 1
            elif st[pos:pos + 2] == "SC":
                if st[pos + 2] == "H":
                    if st[pos + 3:pos + 5] in ("OO", "ER", "EN", "UY", "ED", "EM"):
                        if st[pos + 3:pos + 5] in ("ER", "EN"):
                            add("X", "SK")
                        else:
                            add("SK", "SK")
                    elif (pos == first and st[first + 3] not in vowels
                          and st[first + 3] != "W"):
                        add("X", "S")
                    else:
                        add("X", "X")
                elif st[pos + 2] in ("I", "E", "Y"):
                    add("S", "S")
                else:
                    add("SK", "SK")
                pos += 3
            elif pos == last and st[pos - 2:pos] in ("AI", "OI"):
                add(None, "S")
                pos += 1
            else:
                add("S", "S")
                pos += 2 if st[pos + 1] in ("S", "Z") else 1

        elif ch == "T":
            if st[pos:pos + 4] == "TION":
                add("X", "X")
                pos += 3
            elif st[pos:pos + 3] in ("TIA", "TCH"):
                add("X", "X")
                pos += 3
            elif st[pos:pos + 2] == "TH" or st[pos:pos + 3] == "TTH":
                if (st[pos + 2:pos + 4] in ("OM", "AM")
                        or st[first:first + 4] in ("VON ", "VAN ")
                        or st[first:first + 3] == "SCH"):
                    add("T", "T")
                else:
                    add("0", "T")
                pos += 2
            elif st[pos + 1] in ("T", "D"):
                add("T", "T")
                pos += 2
            else:
                add("T", "T")
                pos += 1

        elif ch == "V":
            add("F", "F")
            pos += 2 if st[pos + 1] == "V" else 1

        elif ch == "W":
            if st[pos:pos + 2] == "WR":
                add("R", "R")
                pos += 2
            else:
                if pos == first and (st[pos + 1] in vowels or st[pos:pos + 2] == "WH"):
                    if st[pos + 1] in vowels:
                        add("A", "F")
                    else:
                        add("A", "A")
                if ((pos == last and st[pos - 1] in vowels)
                        or st[pos - 1:pos + 5] in ("EWSKI", "EWSKY", "OWSKI", "OWSKY")
                        or st[first:first + 3] == "SCH"):
                    add(None, "F")
                    pos += 1
                elif st[pos:pos + 4] in ("WICZ", "WITZ"):
                    add("TS", "FX")
                    pos += 4
                else:
                    pos += 1

        elif ch == "X":
            if not (pos == last
                    and (st[pos - 3:pos] in ("IAU", "EAU")
                         or st[pos - 2:pos] in ("AU", "OU"))):
                add("KS", "KS")
            pos += 2 if st[pos + 1] in ("C", "X") else 1

        elif ch == "Z":
            if st[pos + 1] == "H":
                add("J", "J")
            elif (st[pos + 1:pos + 3] in ("ZO", "ZI", "ZA")
                  or (slavo and pos > first and st[pos - 1] != "T")):
                add("S", "TS")
            else:
                add("S", "S")
            pos += 2 if st[pos + 1] == "Z" else 1

        else:
            pos += 1

    return "".join(pri), "".join(sec)


_ENCODERS = {
    PhoneticAlgorithm.SOUNDEX: soundex,
    PhoneticAlgorithm.METAPHONE: metaphone,
    PhoneticAlgorithm.DOUBLE_METAPHONE: double_metaphone,
    PhoneticAlgorithm.NYSIIS: nysiis,
    PhoneticAlgorithm.MRA: mra,
}
