import { App } from "./app.js";

const root = document.getElementById("app");
const banners = document.getElementById("banners");
if (!root || !banners) {
  throw new Error("index.html must provide #app and #banners mount points");
}

const reviewer = document.getElementById("reviewer") as HTMLInputElement | null;
if (reviewer) {
  reviewer.value = window.localStorage.getItem("reviewer") ?? "";
  reviewer.addEventListener("change", () => {
    window.localStorage.setItem("reviewer", reviewer.value.trim());
  });
}

new App(root, banners).start();
