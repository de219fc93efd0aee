var jq = window.jQuery || window.$ || window.$jq || window.$j;
if(jq && jq.fn) {
   return jq.fn.jquery || null; //version (if known)
} else {
   return false; //jQuery not found
}
