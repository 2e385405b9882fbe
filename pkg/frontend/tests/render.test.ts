import { beforeEach, describe, expect, it, vi } from "vitest";

import { colorFor, PALETTE } from "../src/palette.js";
import { formatTimestamp, renderResults, type ResultHandlers } from "../src/render.js";
import { initialState } from "../src/state.js";
import type { SearchHit, SessionState } from "../src/types.js";
import { makeGroup, makeHit, makeResponse } from "./helpers.js";

let container: HTMLElement;
const noop: ResultHandlers = { onTileClick: () => undefined };

beforeEach(() => {
  document.body.innerHTML = "";
  container = document.createElement("div");
  document.body.appendChild(container);
});

function stateWith(over: Partial<SessionState>): SessionState {
  return { ...initialState(), ...over };
}

/** jsdom normalizes colors on read; round-trip the expectation the same way. */
function normalizeColor(color: string): string {
  const probe = document.createElement("span");
  probe.style.borderLeftColor = color;
  return probe.style.borderLeftColor;
}

describe("renderResults", () => {
  it("renders one row per video group, in exactly the server's order", () => {
    const response = makeResponse([
      makeGroup("zeta", 5, [makeHit({ frame_id: 1 })]),
      makeGroup("alpha", 2, [makeHit({ frame_id: 2 })]),
      makeGroup("mid", 9, [makeHit({ frame_id: 3 })]),
    ]);
    renderResults(container, stateWith({ response }), noop);

    const rows = [...container.querySelectorAll(".video-group")];
    expect(rows.map((r) => r.getAttribute("data-video-id"))).toEqual([
      "zeta",
      "alpha",
      "mid",
    ]);
  });

  it("keeps tiles in response order even when scores are not monotone", () => {
    const hits = [
      makeHit({ frame_id: 7, rank: 1, score: 0.2 }),
      makeHit({ frame_id: 3, rank: 2, score: 0.9 }),
      makeHit({ frame_id: 9, rank: 3, score: 0.5 }),
    ];
    const response = makeResponse([makeGroup("beach", 0, hits)]);
    renderResults(container, stateWith({ response }), noop);

    const ids = [...container.querySelectorAll(".tile")].map((t) =>
      t.getAttribute("data-frame-id"),
    );
    expect(ids).toEqual(["7", "3", "9"]);
  });

  it("paints each row's left border with the palette hue for its color index", () => {
    const response = makeResponse([
      makeGroup("beach", 0, [makeHit({ frame_id: 1 })]),
      makeGroup("city", 5, [makeHit({ frame_id: 2 })]),
    ]);
    renderResults(container, stateWith({ response }), noop);

    const rows = [...container.querySelectorAll<HTMLElement>(".video-group")];
    expect(rows[0]?.style.borderLeftColor).toBe(normalizeColor(colorFor(0)));
    expect(rows[1]?.style.borderLeftColor).toBe(normalizeColor(colorFor(5)));
    expect(rows[0]?.style.borderLeftColor).not.toBe(rows[1]?.style.borderLeftColor);
  });

  it("cycles the palette instead of failing on an out-of-range color index", () => {
    expect(colorFor(12)).toBe(PALETTE[0]);
    expect(colorFor(25)).toBe(PALETTE[1]);
    expect(colorFor(-1)).toBe(PALETTE[11]);
  });

  it("tiles carry a lazy thumbnail, the rank, and the score", () => {
    const hit = makeHit({
      frame_id: 42,
      rank: 3,
      score: 0.8734,
      image_path: "frames/beach walk/000 01.jpg",
    });
    renderResults(
      container,
      stateWith({ response: makeResponse([makeGroup("beach", 0, [hit])]) }),
      noop,
    );

    const tile = container.querySelector(".tile");
    expect(tile?.getAttribute("data-frame-id")).toBe("42");

    const img = tile?.querySelector("img");
    expect(img?.getAttribute("loading")).toBe("lazy");
    expect(img?.getAttribute("src")).toBe("/media/frames/beach%20walk/000%2001.jpg");

    expect(tile?.querySelector(".tile-rank")?.textContent).toBe("#3");
    expect(tile?.querySelector(".tile-score")?.textContent).toBe("0.873");
  });

  it("marks clip-inherited hits with a badge", () => {
    const response = makeResponse([
      makeGroup("beach", 0, [
        makeHit({ frame_id: 1, clip_inherited: true }),
        makeHit({ frame_id: 2 }),
      ]),
    ]);
    renderResults(container, stateWith({ response }), noop);

    const badges = [...container.querySelectorAll(".tile")].map(
      (t) => t.querySelector(".tile-badge") !== null,
    );
    expect(badges).toEqual([true, false]);
  });

  it("shows a 'no results' placeholder for an empty response", () => {
    const response = makeResponse([]);
    renderResults(container, stateWith({ response }), noop);

    const placeholder = container.querySelector(".placeholder");
    expect(placeholder).not.toBeNull();
    expect(placeholder?.textContent).toMatch(/no results/i);
    expect(container.querySelector(".video-group")).toBeNull();
  });

  it("shows an idle prompt before any search ran", () => {
    renderResults(container, stateWith({ response: null }), noop);
    expect(container.querySelector(".placeholder")).not.toBeNull();
  });

  it("windows long result lists to visibleTiles and extends on demand", () => {
    const hits: SearchHit[] = [];
    for (let i = 0; i < 150; i += 1) {
      hits.push(makeHit({ frame_id: i, rank: i + 1 }));
    }
    const response = makeResponse([makeGroup("beach", 0, hits)]);

    renderResults(container, stateWith({ response, visibleTiles: 100 }), noop);
    let tiles = [...container.querySelectorAll(".tile")];
    expect(tiles).toHaveLength(100);
    expect(tiles.map((t) => t.getAttribute("data-frame-id"))).toEqual(
      hits.slice(0, 100).map((h) => String(h.frame_id)),
    );
    expect(container.querySelector(".results-more")).not.toBeNull();

    renderResults(container, stateWith({ response, visibleTiles: 200 }), noop);
    tiles = [...container.querySelectorAll(".tile")];
    expect(tiles).toHaveLength(150);
    expect(container.querySelector(".results-more")).toBeNull();
  });

  it("spends the tile budget across groups in order, truncating the tail", () => {
    const a = makeGroup(
      "alpha",
      0,
      Array.from({ length: 80 }, (_, i) => makeHit({ frame_id: i })),
    );
    const b = makeGroup(
      "beta",
      1,
      Array.from({ length: 40 }, (_, i) => makeHit({ frame_id: 100 + i })),
    );
    const c = makeGroup("gamma", 2, [makeHit({ frame_id: 999 })]);

    renderResults(
      container,
      stateWith({ response: makeResponse([a, b, c]), visibleTiles: 100 }),
      noop,
    );

    const rows = [...container.querySelectorAll(".video-group")];
    expect(rows).toHaveLength(2); // gamma's budget ran out before it rendered
    expect(rows[0]?.querySelectorAll(".tile")).toHaveLength(80);
    expect(rows[1]?.querySelectorAll(".tile")).toHaveLength(20);
  });

  it("clicking a tile reports the hit and its video id", () => {
    const onTileClick = vi.fn();
    const hit = makeHit({ frame_id: 42 });
    renderResults(
      container,
      stateWith({ response: makeResponse([makeGroup("beach", 0, [hit])]) }),
      { onTileClick },
    );

    container.querySelector<HTMLButtonElement>(".tile")?.click();
    expect(onTileClick).toHaveBeenCalledTimes(1);
    expect(onTileClick).toHaveBeenCalledWith(hit, "beach");
  });

  it("summarizes an active object filter in the meta line", () => {
    const response = makeResponse([makeGroup("beach", 0, [makeHit()])], {
      object_filter: {
        source: "text",
        match_mode: "all",
        class_ids: [1, 6],
        class_names: ["dog", "traffic light"],
      },
    });
    renderResults(container, stateWith({ response }), noop);
    expect(container.querySelector(".results-meta")?.textContent).toContain(
      "dog, traffic light",
    );
  });
});

describe("formatTimestamp", () => {
  it("renders minutes, seconds, and milliseconds", () => {
    expect(formatTimestamp(0)).toBe("0:00.000");
    expect(formatTimestamp(83250)).toBe("1:23.250");
    expect(formatTimestamp(4250)).toBe("0:04.250");
  });
});
