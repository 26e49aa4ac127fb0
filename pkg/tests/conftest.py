import shutil
from pathlib import Path

import pytest

DEJAVU_DIR = Path("/usr/share/fonts/truetype/dejavu")
SANS = DEJAVU_DIR / "DejaVuSans.ttf"
SANS_BOLD = DEJAVU_DIR / "DejaVuSans-Bold.ttf"
SERIF = DEJAVU_DIR / "DejaVuSerif.ttf"
MONO = DEJAVU_DIR / "DejaVuSansMono.ttf"

# Words built from DejaVu-covered Arabic letters, several carrying the
# combining marks U+0654/U+0655/U+0657.
ARABIC_WORDS = [
    "سلام",
    "دنیا",
    "کتاب",
    "قلم",
    "مدرسه",
    "باغ",
    "گل",
    "آب",
    "نور",
    "شب",
    "روز",
    "ماه",
    "ستاره",
    "دریا",
    "کوه",
    "سۄن",
    "کٲشُر",
    "زبان",
    "گھر",
    "سٔر",
    "مٕل",
    "بٗن",
    "خط",
    "علم",
    "فکر",
    "یاد",
    "وقت",
    "سال",
    "صبح",
    "شام",
]


def make_corpus_text(n_words=240):
    words = [ARABIC_WORDS[i % len(ARABIC_WORDS)] for i in range(n_words)]
    lines = []
    for i in range(0, len(words), 8):
        chunk = words[i : i + 8]
        sep = "، " if (i // 8) % 3 else " "
        lines.append(sep.join(chunk) + ("۔" if (i // 8) % 2 else "."))
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def sans_path():
    assert SANS.exists(), "DejaVu Sans is expected on this system"
    return str(SANS)


@pytest.fixture(scope="session")
def three_font_paths(tmp_path_factory):
    # three distinct files so percentage bookkeeping is per-entry
    base = tmp_path_factory.mktemp("fonts")
    paths = []
    for src, name in [(SANS, "a.ttf"), (SANS_BOLD, "b.ttf"), (MONO, "c.ttf")]:
        dst = base / name
        shutil.copyfile(src, dst)
        paths.append(str(dst))
    return paths


@pytest.fixture(scope="session")
def corpus_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("corpus") / "corpus.txt"
    p.write_text(make_corpus_text(), encoding="utf-8")
    return str(p)
