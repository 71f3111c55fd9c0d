#!/usr/bin/env python3
"""Regenerates src/unicode_tables.inc from the Python unicodedata database.

Emits contiguous codepoint ranges for the letter general categories
(Lu, Ll, Lt, Lm, Lo) and a 1:1 simple lowercase mapping table.  Mappings
that expand to multiple codepoints are reduced to their first codepoint,
and the table is post-processed so that lowering is idempotent.
"""
import sys
import unicodedata

MAX_CP = 0x2FFFF  # BMP + SMP covers every letter a text corpus will hold


def is_letter(cp: int) -> bool:
    return unicodedata.category(chr(cp)).startswith("L")


def main() -> None:
    ranges = []
    start = None
    for cp in range(MAX_CP + 1):
        if 0xD800 <= cp <= 0xDFFF:
            letter = False
        else:
            letter = is_letter(cp)
        if letter and start is None:
            start = cp
        elif not letter and start is not None:
            ranges.append((start, cp - 1))
            start = None
    if start is not None:
        ranges.append((start, MAX_CP))

    lower = {}
    upper = {}
    for cp in range(MAX_CP + 1):
        if 0xD800 <= cp <= 0xDFFF or not is_letter(cp):
            continue
        lo = ord(chr(cp).lower()[0])
        if lo != cp:
            lower[cp] = lo
        up = ord(chr(cp).upper()[0])
        if up != cp:
            upper[cp] = up
    # force idempotence
    for table in (lower, upper):
        for cp in list(table):
            tgt = table[cp]
            seen = {cp}
            while tgt in table and tgt not in seen:
                seen.add(tgt)
                tgt = table[tgt]
            table[cp] = tgt

    out = sys.stdout
    out.write("// Generated by tools/gen_unicode_tables.py -- do not edit.\n")
    out.write("// Letter ranges: Unicode general categories Lu/Ll/Lt/Lm/Lo.\n")
    out.write(f"static constexpr CodepointRange kLetterRanges[] = {{\n")
    for lo, hi in ranges:
        out.write(f"    {{0x{lo:X}, 0x{hi:X}}},\n")
    out.write("};\n\n")
    out.write("static constexpr CaseMapping kLowerMappings[] = {\n")
    for cp in sorted(lower):
        out.write(f"    {{0x{cp:X}, 0x{lower[cp]:X}}},\n")
    out.write("};\n\n")
    out.write("static constexpr CaseMapping kUpperMappings[] = {\n")
    for cp in sorted(upper):
        out.write(f"    {{0x{cp:X}, 0x{upper[cp]:X}}},\n")
    out.write("};\n")


if __name__ == "__main__":
    main()
