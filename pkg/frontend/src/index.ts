export * from "./types.js";
export * from "./api.js";
export * from "./viewmodel.js";
export * from "./render.js";
export * from "./session.js";
