/**
 * Frame modal: a filmstrip of the anchor frame and up to four temporal
 * neighbors on each side, plus the source video seeked to the anchor's
 * timestamp. Rendered from {@link ModalState} alone, like every other view.
 */

import { mediaUrl } from "./api.js";
import { formatTimestamp } from "./render.js";
import type { ModalState, NeighborFrame } from "./types.js";

export interface ModalHandlers {
  onChoose: (frameId: number) => void;
  onClose: () => void;
}

/** Play without letting an autoplay rejection surface as an unhandled error. */
function safePlay(video: HTMLVideoElement): void {
  try {
    const result = video.play() as unknown;
    if (result instanceof Promise) {
      void result.catch(() => undefined);
    }
  } catch {
    // Playback can be refused (autoplay policy, unsupported codec); the
    // controls stay available so the user can start it by hand.
  }
}

function buildNeighbor(frame: NeighborFrame): HTMLElement {
  const figure = document.createElement("figure");
  figure.className = frame.is_anchor ? "neighbor anchor" : "neighbor";
  figure.dataset["frameId"] = String(frame.frame_id);

  const img = document.createElement("img");
  img.className = "neighbor-thumb";
  img.setAttribute("loading", "lazy");
  img.setAttribute("decoding", "async");
  img.alt = `frame ${frame.frame_index}`;
  if (frame.image_path) img.src = mediaUrl(frame.image_path);
  figure.appendChild(img);

  const caption = document.createElement("figcaption");
  caption.textContent = formatTimestamp(frame.timestamp_ms);
  figure.appendChild(caption);

  return figure;
}

/**
 * Rebuild the modal container. A null modal clears it; the caller is
 * responsible for giving focus back to whatever opened the dialog.
 */
export function renderModal(
  root: HTMLElement,
  modal: ModalState | null,
  handlers: ModalHandlers,
): void {
  root.textContent = "";
  if (modal === null) return;

  const backdrop = document.createElement("div");
  backdrop.className = "modal-backdrop";
  backdrop.addEventListener("click", (event) => {
    if (event.target === backdrop) handlers.onClose();
  });

  const dialog = document.createElement("div");
  dialog.className = "modal";
  dialog.setAttribute("role", "dialog");
  dialog.setAttribute("aria-modal", "true");

  const header = document.createElement("header");
  header.className = "modal-header";

  const title = document.createElement("h2");
  title.className = "modal-title";
  title.textContent = `${modal.videoId} @ ${formatTimestamp(modal.timestampMs)}`;
  header.appendChild(title);

  const close = document.createElement("button");
  close.type = "button";
  close.className = "modal-close";
  close.setAttribute("aria-label", "Close");
  close.textContent = "×";
  close.addEventListener("click", () => handlers.onClose());
  header.appendChild(close);

  dialog.appendChild(header);

  if (modal.error !== null) {
    const error = document.createElement("p");
    error.className = "modal-error";
    error.textContent = modal.error;
    dialog.appendChild(error);
  } else if (modal.neighbors === null) {
    const loading = document.createElement("p");
    loading.className = "placeholder";
    loading.textContent = "Loading neighbors…";
    dialog.appendChild(loading);
  } else {
    const strip = document.createElement("div");
    strip.className = "filmstrip";
    for (const frame of modal.neighbors.frames) {
      strip.appendChild(buildNeighbor(frame));
    }
    dialog.appendChild(strip);

    if (modal.neighbors.video_path !== null && modal.neighbors.video_path !== "") {
      const video = document.createElement("video");
      video.className = "modal-video";
      video.controls = true;
      video.preload = "metadata";
      video.src = mediaUrl(modal.neighbors.video_path);
      const seek = () => {
        video.currentTime = modal.timestampMs / 1000;
      };
      video.addEventListener("loadedmetadata", seek, { once: true });
      seek();
      dialog.appendChild(video);
      safePlay(video);
    }
  }

  const footer = document.createElement("footer");
  footer.className = "modal-footer";

  const choose = document.createElement("button");
  choose.type = "button";
  choose.className = "choose-this";
  choose.dataset["frameId"] = String(modal.frameId);
  choose.textContent = "Choose this frame";
  choose.addEventListener("click", () => handlers.onChoose(modal.frameId));
  footer.appendChild(choose);

  dialog.appendChild(footer);
  backdrop.appendChild(dialog);
  root.appendChild(backdrop);
}
