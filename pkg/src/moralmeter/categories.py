"""Moral emotion categories and annotation choice tokens.

The six categories have a fixed canonical order used everywhere ties must be
broken deterministically (argmax tie-breaks, serialization, quota ordering).
"""

from __future__ import annotations

from enum import Enum


class EmotionCategory(str, Enum):
    """The six moral-emotion categories, in canonical order."""

    OTHER_CONDEMNING = "other_condemning"
    OTHER_PRAISING = "other_praising"
    OTHER_SUFFERING = "other_suffering"
    SELF_CONSCIOUS = "self_conscious"
    NEUTRAL = "neutral"
    NON_MORAL = "non_moral"


#: Canonical order of the six category tokens.
CATEGORY_ORDER: tuple[str, ...] = tuple(c.value for c in EmotionCategory)

#: Seventh annotation choice; admissible for raters, never a gold label.
HARD_TO_TELL = "hard_to_tell"

#: All seven admissible annotation choice tokens, canonical order first.
CHOICE_ORDER: tuple[str, ...] = CATEGORY_ORDER + (HARD_TO_TELL,)

CATEGORY_SET = frozenset(CATEGORY_ORDER)
CHOICE_SET = frozenset(CHOICE_ORDER)

#: Display names and short definitions for annotation UIs, per language.
CATEGORY_DISPLAY: dict[str, dict[str, str]] = {
    "other_condemning": {
        "name_en": "Other-condemning",
        "name_ko": "타인 비난",
        "desc_en": "Emotions that condemn others, such as anger, contempt, or disgust.",
        "desc_ko": "분노, 경멸, 혐오 등과 같이 타인을 비난하는 감정",
    },
    "other_praising": {
        "name_en": "Other-praising",
        "name_ko": "타인 칭찬",
        "desc_en": "Emotions that praise others, such as admiration, gratitude, or awe.",
        "desc_ko": "감탄, 감사, 경외감 등과 같이 타인을 칭찬하는 감정",
    },
    "other_suffering": {
        "name_en": "Other-suffering",
        "name_ko": "타인 고통 공감",
        "desc_en": "Emotions of empathy for the suffering of others, such as compassion or sympathy.",
        "desc_ko": "연민, 동정 등과 같이 타인의 고통에 공감하는 감정",
    },
    "self_conscious": {
        "name_en": "Self-conscious",
        "name_ko": "자의식",
        "desc_en": "Emotions that negatively evaluate oneself, such as shame, guilt, or embarrassment.",
        "desc_ko": "수치심, 죄책감, 당혹감 등과 같이 자신을 부정적으로 평가하는 감정",
    },
    "neutral": {
        "name_en": "Neutral",
        "name_ko": "중립",
        "desc_en": "A neutral category with no or few emotions.",
        "desc_ko": "감정이 없거나 거의 없는 중립적인 카테고리",
    },
    "non_moral": {
        "name_en": "Non-moral emotion",
        "name_ko": "비도덕 감정",
        "desc_en": (
            "Emotions that are not part of the other moral emotion categories, "
            "such as fear, surprise, joy, or optimism."
        ),
        "desc_ko": "두려움, 놀라움, 기쁨, 낙관주의 등과 같이 감정은 있으나 다른 도덕감정 범주에 속하지 않는 감정",
    },
    "hard_to_tell": {
        "name_en": "Hard to tell",
        "name_ko": "판단 어려움",
        "desc_en": "None of the six categories applies.",
        "desc_ko": "여섯 가지 범주 중 어느 것도 해당하지 않음",
    },
}
