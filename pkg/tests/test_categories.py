from moralmeter import CATEGORY_ORDER, CHOICE_ORDER, HARD_TO_TELL, EmotionCategory
from moralmeter.categories import CATEGORY_DISPLAY


def test_six_categories_in_canonical_order():
    assert CATEGORY_ORDER == (
        "other_condemning",
        "other_praising",
        "other_suffering",
        "self_conscious",
        "neutral",
        "non_moral",
    )
    assert [c.value for c in EmotionCategory] == list(CATEGORY_ORDER)


def test_choice_order_appends_hard_to_tell():
    assert CHOICE_ORDER == CATEGORY_ORDER + (HARD_TO_TELL,)
    assert len(CHOICE_ORDER) == 7


def test_categories_are_plain_strings():
    # (str, Enum) members compare and serialize as their token
    assert EmotionCategory.OTHER_CONDEMNING == "other_condemning"
    assert EmotionCategory("neutral") is EmotionCategory.NEUTRAL


def test_display_table_covers_every_choice_in_both_languages():
    assert set(CATEGORY_DISPLAY) == set(CHOICE_ORDER)
    for entry in CATEGORY_DISPLAY.values():
        for key in ("name_en", "name_ko", "desc_en", "desc_ko"):
            assert entry[key].strip()
