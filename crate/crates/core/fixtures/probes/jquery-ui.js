var jq = window.jQuery;
if(jq && jq.ui) {
   return jq.ui.version || null;
} else {
   return false;
}
