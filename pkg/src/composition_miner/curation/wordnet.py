"""Reader for the WordNet 3.x noun database files (index.noun, data.noun).

Only the noun sections are needed: lemma lookup for the dictionary filter,
and per-synset meronym pointers plus glosses for the reference-dataset
adapters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


class LexiconLoadError(Exception):
    pass


PART_MERONYM = "%p"
SUBSTANCE_MERONYM = "%s"
MEMBER_MERONYM = "%m"


@dataclass(frozen=True)
class Synset:
    offset: str
    words: tuple[str, ...]
    gloss: str
    part_meronyms: tuple[str, ...] = ()
    substance_meronyms: tuple[str, ...] = ()


def _lemma_key(text: str) -> str:
    return "_".join(text.strip().lower().split())


@dataclass
class WordNetLexicon:
    """Noun lemmas and synsets loaded from a WordNet database directory."""

    lemma_offsets: dict[str, tuple[str, ...]] = field(default_factory=dict)
    synsets: dict[str, Synset] = field(default_factory=dict)

    @classmethod
    def load(cls, directory: str | Path) -> "WordNetLexicon":
        directory = Path(directory)
        index_path = directory / "index.noun"
        data_path = directory / "data.noun"
        for path in (index_path, data_path):
            if not path.is_file():
                raise LexiconLoadError(f"missing database file {path}")
        lexicon = cls()
        try:
            lexicon._load_index(index_path)
            lexicon._load_data(data_path)
        except (OSError, ValueError, IndexError) as exc:
            raise LexiconLoadError(f"corrupt database under {directory}: {exc}") from exc
        return lexicon

    def _load_index(self, path: Path) -> None:
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                if not line.strip() or line.startswith(" "):
                    continue  # license header lines start with two spaces
                tokens = line.split()
                lemma = tokens[0]
                synset_cnt = int(tokens[2])
                offsets = tuple(tokens[-synset_cnt:])
                self.lemma_offsets[lemma] = offsets

    def _load_data(self, path: Path) -> None:
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                if not line.strip() or line.startswith(" "):
                    continue
                body, _, gloss = line.partition("|")
                tokens = body.split()
                offset = tokens[0]
                w_cnt = int(tokens[3], 16)
                words = tuple(tokens[4 + 2 * i] for i in range(w_cnt))
                p_start = 4 + 2 * w_cnt
                p_cnt = int(tokens[p_start])
                part_meronyms = []
                substance_meronyms = []
                for i in range(p_cnt):
                    symbol = tokens[p_start + 1 + 4 * i]
                    target = tokens[p_start + 2 + 4 * i]
                    if symbol == PART_MERONYM:
                        part_meronyms.append(target)
                    elif symbol == SUBSTANCE_MERONYM:
                        substance_meronyms.append(target)
                self.synsets[offset] = Synset(
                    offset=offset,
                    words=words,
                    gloss=gloss.strip(),
                    part_meronyms=tuple(part_meronyms),
                    substance_meronyms=tuple(substance_meronyms),
                )

    def has_noun(self, name: str) -> bool:
        return _lemma_key(name) in self.lemma_offsets

    def synsets_for(self, name: str) -> tuple[Synset, ...]:
        offsets = self.lemma_offsets.get(_lemma_key(name), ())
        return tuple(self.synsets[o] for o in offsets if o in self.synsets)

    def words_of(self, offset: str) -> tuple[str, ...]:
        synset = self.synsets.get(offset)
        if synset is None:
            return ()
        return tuple(w.replace("_", " ") for w in synset.words)
