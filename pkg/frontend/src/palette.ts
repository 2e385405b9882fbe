/**
 * Fixed 12-hue palette for video-group accents.
 *
 * The server assigns each video a stable `color_index`; the console only
 * looks the hue up — it never hashes video ids itself, so the accent a video
 * gets here always matches what any other client of the same service shows.
 */

export const PALETTE: readonly string[] = [
  "#e6194b", // red
  "#f58231", // orange
  "#ffb300", // amber
  "#bfae1b", // olive
  "#3cb44b", // green
  "#2aa198", // teal
  "#46b8d8", // cyan
  "#4363d8", // blue
  "#7b5bd6", // violet
  "#b052c5", // purple
  "#e05fa8", // magenta
  "#a0756b", // umber
];

/** Hue for a server-assigned color index; cycles when the index overflows. */
export function colorFor(colorIndex: number): string {
  const n = PALETTE.length;
  const i = ((Math.trunc(colorIndex) % n) + n) % n;
  return PALETTE[i] as string;
}
