"""Build the shipped prompt benchmark deterministically.

Writes 520 prompts across the four meta classes and three sub-types with
per-prompt ground-truth attributes. Regenerating with the same seed yields a
byte-identical file.
"""

from __future__ import annotations

import argparse
import random
from dataclasses import asdict
from pathlib import Path

from videval.benchmark import (
    AttributeSet,
    Benchmark,
    ObjectSpec,
    PromptRecord,
    benchmark_stats,
    save_benchmark,
    validate_benchmark,
)

SEED = 20240601

HUMAN_SUBJECTS = [
    "a young woman", "an elderly man", "a chef in a white apron", "a firefighter",
    "a street musician", "a ballet dancer", "a construction worker", "a scientist",
    "two children", "a marathon runner", "a fisherman", "a painter",
    "a tall basketball player", "a mail carrier", "a gardener", "a violinist",
]

ANIMALS = {
    "dog": ("black", "brown", "white"),
    "cat": ("black", "white", "gray", "orange"),
    "horse": ("brown", "black", "white"),
    "bird": ("blue", "red", "yellow", "green"),
    "sheep": ("white", "black"),
    "cow": ("brown", "black"),
    "elephant": ("gray",),
    "bear": ("brown", "black"),
    "zebra": (),
    "giraffe": (),
}

THINGS = {
    "car": ("red", "blue", "black", "white", "yellow"),
    "bicycle": ("red", "green", "blue", "black"),
    "umbrella": ("red", "yellow", "purple", "pink"),
    "cup": ("red", "blue", "white", "green"),
    "bottle": ("green", "blue", "brown"),
    "chair": ("white", "black", "brown"),
    "backpack": ("orange", "blue", "gray"),
    "kite": ("red", "yellow", "pink"),
    "vase": ("blue", "white", "purple"),
    "clock": ("black", "white", "brown"),
    "couch": ("gray", "brown", "green"),
    "laptop": ("black", "gray", "white"),
    "bench": ("green", "brown", "white"),
    "bowl": ("blue", "white", "orange"),
    "book": ("red", "green", "blue"),
}

LANDSCAPES = [
    "a misty mountain valley", "a tropical beach with palm trees", "a dense pine forest",
    "rolling green hills", "a vast desert of golden dunes", "a frozen lake",
    "a winding river canyon", "a field of wildflowers", "a rocky coastline",
    "a terraced rice paddy", "an alpine meadow", "a bamboo grove",
    "a volcanic crater", "a coral reef", "a salt flat under a huge sky",
]

CONTEXTS = [
    "in a sunlit city park", "on a rainy street at night", "beside a calm harbor",
    "in a cozy kitchen", "on a crowded market square", "under a bridge at dawn",
    "in an old library", "on a rooftop at sunset", "near a country farmhouse",
    "inside a bright studio", "along a forest trail", "at a quiet train station",
    "on a snowy mountain pass", "in a blooming garden", "by a roaring campfire",
]

DETAILS = [
    "captured in warm evening light", "with soft shadows and gentle wind",
    "under a clear blue sky", "while golden leaves drift past",
    "in crisp morning fog", "as rain streaks the window behind",
    "with sunbeams breaking through clouds", "framed by distant snowy peaks",
    "during a slow colorful sunset", "with reflections shimmering nearby",
    "surrounded by drifting dust motes", "while lanterns glow in the background",
]

ACTIONS_LARGE = [
    "running", "dancing", "jumping rope", "skateboarding", "swimming",
    "kicking a ball", "rock climbing", "riding a bike", "riding a horse",
    "chopping wood", "juggling", "throwing a frisbee", "digging",
    "playing tennis", "kayaking", "skiing",
]
ACTIONS_SMALL = [
    "reading a book", "knitting", "playing chess", "drinking coffee",
    "writing on a whiteboard", "typing on a keyboard", "pouring tea",
    "painting a wall", "brushing teeth", "folding laundry", "ironing clothes",
    "playing guitar", "playing piano", "cooking", "fishing", "tai chi",
]

CELEBRITIES = [
    "Ava Sterling", "Marcus Vale", "Lena Okafor", "Dario Finch", "Priya Anand",
    "Theo Marchetti", "Ingrid Solberg", "Rafael Quintero", "Mei Tanaka",
    "Omar Haddad", "Clara Beaumont", "Jonas Petrov",
]

RENDER_TEXTS = [
    "OPEN", "HELLO WORLD", "COFFEE", "SALE TODAY", "WELCOME", "EXIT",
    "FRESH BREAD", "NO PARKING", "HAPPY BIRTHDAY", "GRAND OPENING",
]

STYLES = [
    "oil painting", "watercolor", "charcoal sketch", "pixel art", "claymation",
    "stop motion", "anime", "film noir", "cyberpunk", "steampunk",
    "vaporwave", "impressionist", "cubist", "pop art", "art deco",
    "ukiyo-e woodblock", "stained glass", "low poly", "origami", "papercraft",
    "comic book", "graffiti", "mosaic", "pointillism", "surrealist",
    "minimalist line art", "chalk drawing", "neon glow", "holographic", "vintage film",
    "sepia photograph", "infrared photography", "double exposure", "tilt-shift", "macro photography",
    "thermal imaging", "blueprint", "embroidery", "felt puppets", "ice sculpture",
    "sand art", "latte art", "folk painting", "gothic", "baroque",
    "renaissance fresco", "abstract expressionist", "glitch art", "risograph print", "cave painting",
]

CAMERA_MOTIONS = [
    ("zoom_in", "camera slowly zooming in on"),
    ("zoom_out", "camera slowly zooming out from"),
    ("pan_left", "camera panning left across"),
    ("pan_right", "camera panning right across"),
    ("tilt_up", "camera tilting up over"),
    ("tilt_down", "camera tilting down toward"),
    ("dolly_forward", "camera dollying forward through"),
    ("dolly_back", "camera pulling back from"),
    ("orbit", "camera orbiting around"),
    ("drone_flyover", "aerial drone flying over"),
    ("handheld", "shaky handheld shot following"),
    ("crane_up", "crane shot rising above"),
    ("crane_down", "crane shot descending toward"),
    ("tracking", "tracking shot alongside"),
    ("whip_pan", "fast whip pan across"),
    ("slow_motion", "slow motion close-up of"),
    ("time_lapse", "time lapse of"),
    ("first_person", "first person view walking through"),
    ("dutch_angle", "tilted dutch angle shot of"),
    ("rack_focus", "rack focus shifting between foreground and"),
]

COUNT_WORDS = {1: "one", 2: "two", 3: "three", 4: "four"}


def _sentence(*parts: str) -> str:
    text = " ".join(p.strip() for p in parts if p and p.strip())
    return text.rstrip(",")


class Builder:
    def __init__(self) -> None:
        self.rng = random.Random(SEED)
        self.records: list[PromptRecord] = []
        self.serial = 0

    def maybe_detail(self) -> str:
        # Roughly 40% of general prompts carry a trailing detail clause; this
        # keeps the mean prompt length near 12.5 words.
        return self.rng.choice(DETAILS) if self.rng.random() < 0.4 else ""

    def add(self, meta_class: str, sub_type: str, text: str, attributes: AttributeSet = AttributeSet(),
            style_tag: str | None = None, camera_tag: str | None = None) -> None:
        self.serial += 1
        self.records.append(
            PromptRecord(
                id=f"{meta_class[:3]}-{self.serial:04d}",
                text=text,
                meta_class=meta_class,
                sub_type=sub_type,
                attributes=attributes,
                style_tag=style_tag,
                camera_tag=camera_tag,
            )
        )

    # -- general prompts per meta class ---------------------------------

    def human_general(self, n: int) -> None:
        action_pool = ACTIONS_LARGE + ACTIONS_SMALL
        for i in range(n):
            kind = i % 5
            subject = self.rng.choice(HUMAN_SUBJECTS)
            context = self.rng.choice(CONTEXTS)
            detail = self.maybe_detail()
            if kind in (0, 1):  # action prompt with amplitude on half
                action = action_pool[i % len(action_pool)]
                amplitude = "large" if action in ACTIONS_LARGE else "small"
                text = _sentence(subject, action, context + ",", detail)
                attrs = AttributeSet(
                    action_label=action,
                    amplitude=amplitude if kind == 0 else None,
                )
                self.add("human", "general", text, attrs)
            elif kind == 2 and i // 5 < len(CELEBRITIES) * 3:
                name = CELEBRITIES[(i // 5) % len(CELEBRITIES)]
                text = _sentence(
                    f"a close-up portrait of {name} smiling gently", context + ",", detail
                )
                self.add("human", "general", text, AttributeSet(celebrity=name))
            else:
                text = _sentence(subject, "walking", context, "and looking around slowly,", detail)
                self.add("human", "general", text, AttributeSet())

    def animal_general(self, n: int) -> None:
        names = list(ANIMALS)
        for i in range(n):
            name = names[i % len(names)]
            colors = ANIMALS[name]
            context = self.rng.choice(CONTEXTS)
            detail = self.maybe_detail()
            count = self.rng.choice((1, 1, 2, 2, 3, 4))
            color = self.rng.choice(colors) if colors and i % 2 == 0 else None
            plural = name + "s" if count > 1 else name
            descriptor = f"{COUNT_WORDS[count]} {color} {plural}" if color else f"{COUNT_WORDS[count]} {plural}"
            verb = "grazing" if name in ("horse", "sheep", "cow", "zebra", "giraffe", "elephant") else "playing"
            text = _sentence(descriptor, verb, "together", context + ",", detail)
            attrs = AttributeSet(objects=(ObjectSpec(name=name, count=count, color=color),))
            self.add("animal", "general", text, attrs)

    def object_general(self, n: int) -> None:
        names = list(THINGS)
        render_budget = 30
        multi_budget = 16
        for i in range(n):
            context = self.rng.choice(CONTEXTS)
            detail = self.maybe_detail()
            if render_budget > 0 and i % 4 == 3:
                render_budget -= 1
                message = RENDER_TEXTS[render_budget % len(RENDER_TEXTS)]
                surface = self.rng.choice(
                    ("a wooden sign", "a neon sign", "a chalkboard", "a banner", "a storefront sign")
                )
                text = _sentence(
                    f'{surface} that clearly reads "{message}"', "hanging", context + ",", detail
                )
                self.add("object", "general", text, AttributeSet(render_text=message))
            elif multi_budget > 0 and i % 4 == 1:
                multi_budget -= 1
                first, second = self.rng.sample(names, 2)
                color_a = self.rng.choice(THINGS[first])
                color_b = self.rng.choice(THINGS[second])
                text = _sentence(
                    f"a {color_a} {first} next to a {color_b} {second}", context + ",", detail
                )
                attrs = AttributeSet(
                    objects=(
                        ObjectSpec(name=first, count=1, color=color_a),
                        ObjectSpec(name=second, count=1, color=color_b),
                    )
                )
                self.add("object", "general", text, attrs)
            else:
                name = names[i % len(names)]
                count = self.rng.choice((1, 2, 2, 3, 4))
                color = self.rng.choice(THINGS[name]) if i % 2 == 0 else None
                plural = name + "s" if count > 1 else name
                descriptor = f"{COUNT_WORDS[count]} {color} {plural}" if color else f"{COUNT_WORDS[count]} {plural}"
                text = _sentence(descriptor, "resting", context + ",", detail)
                attrs = AttributeSet(objects=(ObjectSpec(name=name, count=count, color=color),))
                self.add("object", "general", text, attrs)

    def landscape_general(self, n: int) -> None:
        for i in range(n):
            place = LANDSCAPES[i % len(LANDSCAPES)]
            detail = self.maybe_detail()
            kind = i % 3
            if kind == 0:
                text = _sentence(place, "with storm clouds racing overhead and trees bending,", detail)
                self.add("landscape", "general", text, AttributeSet(amplitude="large"))
            elif kind == 1:
                text = _sentence(place, "perfectly still and almost frozen in time,", detail)
                self.add("landscape", "general", text, AttributeSet(amplitude="small"))
            else:
                text = _sentence("a wide view of", place, "stretching to the horizon,", detail)
                self.add("landscape", "general", text, AttributeSet())

    # -- style and camera prompts ----------------------------------------

    def style_prompts(self, plan: dict[str, int]) -> None:
        style_index = 0
        for meta_class, count in plan.items():
            for _ in range(count):
                style = STYLES[style_index]
                style_index += 1
                detail = self.maybe_detail()
                if meta_class == "human":
                    core = self.rng.choice(HUMAN_SUBJECTS) + " " + self.rng.choice(ACTIONS_SMALL)
                elif meta_class == "animal":
                    core = "a " + self.rng.choice(list(ANIMALS)) + " resting calmly"
                elif meta_class == "object":
                    core = "a " + self.rng.choice(list(THINGS)) + " on a polished table"
                else:
                    core = self.rng.choice(LANDSCAPES)
                text = _sentence(core + ",", detail + ",", f"rendered in {style} style")
                self.add(meta_class, "style", text, AttributeSet(), style_tag=style)

    def camera_prompts(self, plan: dict[str, int]) -> None:
        camera_index = 0
        for meta_class, count in plan.items():
            for _ in range(count):
                tag, phrase = CAMERA_MOTIONS[camera_index]
                camera_index += 1
                detail = self.maybe_detail()
                if meta_class == "human":
                    core = self.rng.choice(HUMAN_SUBJECTS) + " waiting patiently"
                elif meta_class == "animal":
                    core = "a " + self.rng.choice(list(ANIMALS)) + " standing alert"
                elif meta_class == "object":
                    core = "a " + self.rng.choice(list(THINGS)) + " on display"
                else:
                    core = self.rng.choice(LANDSCAPES)
                text = _sentence(phrase, core + ",", detail)
                self.add(meta_class, "camera_motion", text, AttributeSet(), camera_tag=tag)


def build() -> Benchmark:
    builder = Builder()
    builder.human_general(122)
    builder.animal_general(112)
    builder.object_general(122)
    builder.landscape_general(94)
    builder.style_prompts({"human": 13, "animal": 13, "object": 13, "landscape": 11})
    builder.camera_prompts({"human": 5, "animal": 5, "object": 5, "landscape": 5})
    return Benchmark(records=tuple(builder.records))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    default_out = Path(__file__).resolve().parent.parent / "src" / "videval" / "data" / "benchmark_v1.jsonl"
    parser.add_argument("--out", default=str(default_out))
    args = parser.parse_args()
    benchmark = build()
    validate_benchmark(benchmark)
    save_benchmark(benchmark, args.out)
    stats = benchmark_stats(benchmark)
    print(f"wrote {args.out}")
    for key, value in asdict(stats).items():
        if key != "word_histogram":
            print(f"  {key}: {value}")


if __name__ == "__main__":
    main()
