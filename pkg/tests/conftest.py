import sys
from pathlib import Path

import pytest

SRC = Path(__file__).resolve().parent.parent / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))


TEXT1 = (
    "The building contains one washroom, one bedroom, one livingroom, and one kitchen. "
    "Specifically, washroom1 has 5 squares in northeast. bedroom1 has 14 square meters in east. "
    "Besides, livingroom1 covers 25 square meters located in center. kitchen1 has 12 squares in west. "
    "bedroom1, kitchen1, washroom1 and livingroom1 are connected. bedroom1 is next to washroom1."
)

TEXT2 = (
    "The house has three bedrooms, one washroom, one balcony, one livingroom, and one kitchen. "
    "In practice, bedroom1 has 13 squares in south. bedroom2 has 9 squares in north. "
    "bedroom3 covers 5 square meters located in west. washroom1 has 4 squares in west. "
    "balcony1 is in south with 6 square meters. livingroom1 covers 30 square meters located in center. "
    "kitchen1 is in north with 6 square meters. "
    "livingroom1 is adjacent to bedroom1, bedroom2, balcony1, kitchen1, bedroom3, washroom1. "
    "balcony1, bedroom3 and bedroom1 are connected. bedroom2 is next to kitchen1, washroom1. "
    "bedroom3 is adjacent to washroom1."
)

TEXT_TEXTURED = (
    "The building layout contains one washroom, one study, one livingroom, and one bedroom. "
    "To be specific, washroom1 has Blue Marble floor, and wall is Wall_Cloth and White. "
    "washroom1 is in southeast with 11 square meters. "
    "Additionally, study1 has Wood_color Log floor as well as has Yellow Wall_Cloth wall. "
    "study1 has 8 squares in west. livingroom1 is in center with 21 square meters. "
    "livingroom1 wall is Earth_color Wall_Cloth while uses Black Log for floor. "
    "Besides, bedroom1 covers 10 square meters located in northwest. "
    "bedroom1 floor is Wood_color Log, and has Orange Pure_Color_Wood wall. "
    "livingroom1 is adjacent to washroom1, bedroom1, study1. bedroom1 is next to study1."
)


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    from texthouse import dataset as ds

    out = tmp_path_factory.mktemp("corpus")
    ds.write_corpus(out, n_houses=12, seed=0, n_textures=24, texture_size=32)
    return out


@pytest.fixture(scope="session")
def tiny_checkpoints(tmp_path_factory, tiny_corpus):
    """Quickly trained layout and generator snapshots for service tests."""
    import numpy as np

    from texthouse import dataset as ds
    from texthouse import layout as lo
    from texthouse import texture as tx
    from texthouse.parsing import encode_layout_features
    from texthouse.vocab import Vocabularies

    vocab = Vocabularies()
    houses, split = ds.load_corpus(tiny_corpus)
    samples = []
    for idx in split["train"]:
        x, a = encode_layout_features(houses[idx].spec, vocab)
        gt = np.array([b.as_array() for b in houses[idx].gt_boxes])
        samples.append((x, a, gt))
    params, _ = lo.train_gclpn(samples, lo.TrainConfig(epochs=150, seed=0))

    raw = ds.load_texture_corpus(tiny_corpus / "textures")
    data = [
        (img, tx.make_condition(vocab.material_index(m), vocab.colour_index(c)))
        for img, m, c in raw
    ]
    gen, _, _ = tx.train_lctgan(
        data, tx.TextureTrainConfig(f=2, iterations=3, batch_size=4, seed=0)
    )

    out = tmp_path_factory.mktemp("checkpoints")
    params.save(out / "layout.params")
    gen.save(out / "generator.params")
    return out


@pytest.fixture
def text1():
    return TEXT1


@pytest.fixture
def text2():
    return TEXT2


@pytest.fixture
def text_textured():
    return TEXT_TEXTURED
