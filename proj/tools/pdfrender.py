#!/usr/bin/env python3
"""Render a PDF to PNGs with PyMuPDF, using pdftoppm's command line.

    pdfrender.py -r DPI -png input.pdf PREFIX

writes PREFIX-1.png, PREFIX-2.png, ... (one per page). Exits non-zero when
the PDF cannot be opened or is encrypted.
"""

import argparse
import sys


def main(argv):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("-r", dest="dpi", type=int, default=150)
    parser.add_argument("-png", dest="png", action="store_true")
    parser.add_argument("pdf")
    parser.add_argument("prefix")
    args = parser.parse_args(argv)

    try:
        import pymupdf
    except ImportError:
        import fitz as pymupdf

    try:
        doc = pymupdf.open(args.pdf)
    except Exception as exc:  # pymupdf raises several unrelated types
        print(f"pdfrender: cannot open {args.pdf}: {exc}", file=sys.stderr)
        return 1
    if doc.needs_pass:
        print(f"pdfrender: {args.pdf} is encrypted", file=sys.stderr)
        return 1

    width = len(str(doc.page_count))
    for i, page in enumerate(doc, start=1):
        pix = page.get_pixmap(dpi=args.dpi, alpha=False)
        pix.save(f"{args.prefix}-{i:0{width}d}.png")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
