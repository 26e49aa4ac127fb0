"""
The ten augmentation transforms, side by side
=============================================

Renders one clean word image, then applies each transform at a
representative strength and tiles the results into a single gallery
image (demos/output/augmentations.png).
"""

import math
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from ocrforge import augment
from ocrforge.fonts import FontEntry
from ocrforge.prng import Stream
from ocrforge.renderer import BackgroundSpec, paint_background, plan_layout, render
from ocrforge.textprep import Segment, grapheme_count

HERE = Path(__file__).parent
OUT = HERE / "output"
OUT.mkdir(parents=True, exist_ok=True)

font = FontEntry("/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf", 100.0)
text = "سلام دنیا"
plan = plan_layout(
    Segment(text, grapheme_count(text)), font, 34,
    text_color=(20, 20, 30),
    background=BackgroundSpec(mode="color", color=(245, 232, 200)),
    width=256, height=64, direction="rtl", alignment="center",
    padding_left=10, padding_right=10,
)
clean = render(plan, paint_background(plan.background, 256, 64))
fill = (245, 232, 200)

# one representative parameterization per transform
stream = Stream(7)
gallery = [
    ("clean", clean),
    ("rotation 6°", augment.rotate(clean, 6.0, fill)),
    ("skew 0.18", augment.skew(clean, 0.18, 0.05, fill)),
    ("gaussian blur σ=1.5", augment.gaussian_blur(clean, 1.5)),
    ("motion blur k=7", augment.motion_blur(clean, 7, math.radians(30))),
    ("gaussian noise σ=18", augment.gaussian_noise(clean, 18.0, stream)),
    ("salt & pepper 4%", augment.salt_pepper(clean, 0.04, stream)),
    ("jpeg q=30", augment.jpeg_degrade(clean, 30)),
    ("resolution 0.4x", augment.resolution_degrade(clean, 0.4)),
    ("brightness +15%", augment.brightness(clean, 0.15)),
    ("contrast γ=1.3", augment.contrast(clean, 1.3)),
]

# tile into two columns with captions
cell_w, cell_h, caption_h = 256, 64, 18
cols = 2
rows = math.ceil(len(gallery) / cols)
sheet = Image.new("RGB", (cols * (cell_w + 10) + 10, rows * (cell_h + caption_h + 10) + 10), "white")
drawer = ImageDraw.Draw(sheet)
for i, (name, img) in enumerate(gallery):
    x = 10 + (i % cols) * (cell_w + 10)
    y = 10 + (i // cols) * (cell_h + caption_h + 10)
    sheet.paste(Image.fromarray(img, "RGB"), (x, y))
    drawer.text((x, y + cell_h + 3), name, fill=(60, 60, 60))

target = OUT / "augmentations.png"
sheet.save(target)
print(f"wrote {target} with {len(gallery)} panels")

# a composed recipe, exactly as the generator would apply it
cfg = augment.AugmentationConfig(probability=1.0, max_transforms=4)
recipe = augment.plan_recipe(cfg, Stream.for_sample(42, 0))
print("sampled recipe:", recipe.summary() or "(clean)")
composed = augment.apply(clean, recipe, fill, Stream.for_sample(42, 0))
Image.fromarray(composed, "RGB").save(OUT / "composed_recipe.png")
print(f"wrote {OUT / 'composed_recipe.png'}")
